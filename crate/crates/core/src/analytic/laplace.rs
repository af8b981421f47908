//! Laplace transforms of the aggregate interference seen by a legitimate user
//! (interferers outside the association exclusion discs) and by an
//! eavesdropper (whole plane).

use std::f64::consts::PI;

use super::check_tier;
use crate::error::{Error, Result};
use crate::geometry::TierRatios;
use crate::model::NetworkConfig;
use crate::specialfn::{gamma_pair_delta, hyp2f1_delta};

#[derive(Debug, Clone, Copy)]
struct FieldTier {
    /// `y_j(r) = coef · r^{expo}`
    coef: f64,
    expo: f64,
    density: f64,
    power: f64,
    alpha: f64,
    delta: f64,
}

/// Interference field of a user served by a fixed tier.
#[derive(Debug, Clone)]
pub(crate) struct UserField {
    tiers: Vec<FieldTier>,
}

impl UserField {
    pub fn new(cfg: &NetworkConfig, k: usize) -> Self {
        let tiers = (0..cfg.num_tiers())
            .map(|j| {
                let q = TierRatios::new(cfg, k, j);
                let t = &cfg.tiers[j];
                FieldTier {
                    coef: (q.p_hat * q.b_hat).powf(1.0 / t.alpha),
                    expo: 1.0 / q.a_hat,
                    density: t.density,
                    power: t.power,
                    alpha: t.alpha,
                    delta: 2.0 / t.alpha,
                }
            })
            .collect();
        Self { tiers }
    }

    /// `ln L_I(s; r)`.
    pub fn log_laplace(&self, s: f64, r: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        -self
            .tiers
            .iter()
            .map(|t| {
                let y = t.coef * r.powf(t.expo);
                // s P y^{2-α} = x y² keeps the magnitudes moderate
                let x = s * t.power * y.powf(-t.alpha);
                2.0 * PI * t.density * y * y * x * hyp2f1_delta(t.delta, x) / (t.alpha - 2.0)
            })
            .sum::<f64>()
    }
}

/// `E[exp(-s I)]` for a user served by tier `k` at distance `r_u`.
pub fn laplace_user_interference(cfg: &NetworkConfig, k: usize, s: f64, r_u: f64) -> Result<f64> {
    check_tier(cfg, k)?;
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("Laplace argument {s} must be non-negative")));
    }
    if !(r_u > 0.0) {
        return Err(Error::Domain(format!("user distance {r_u} must be positive")));
    }
    Ok(UserField::new(cfg, k).log_laplace(s, r_u).exp())
}

/// `ln E[exp(-s I_e)]` with interferers spread over the whole plane.
pub(crate) fn log_laplace_eve(cfg: &NetworkConfig, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    -cfg.tiers
        .iter()
        .map(|t| {
            let d = 2.0 / t.alpha;
            PI * t.density * (s * t.power).powf(d) * gamma_pair_delta(d)
        })
        .sum::<f64>()
}

/// `E[exp(-s I_e)]` at an eavesdropper.
pub fn laplace_eve_interference(cfg: &NetworkConfig, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("Laplace argument {s} must be non-negative")));
    }
    Ok(log_laplace_eve(cfg, s).exp())
}
