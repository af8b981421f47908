//! Single-integral forms of the rates when noise is negligible, all tiers
//! share one path-loss exponent and association is unbiased. The legitimate
//! rates then depend only on the exponent and the power split.

use std::f64::consts::LN_2;

use super::{check_tier, integrate_decaying_t, require_homogeneous, LegitRates};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, NomaPowerSplit, UserRole};
use crate::specialfn::{gamma_pair_delta, hyp2f1_delta, integrate_finite, QuadratureSettings};

fn preconditions(cfg: &NetworkConfig, k: usize) -> Result<f64> {
    check_tier(cfg, k)?;
    cfg.validate()?;
    if cfg.noise != 0.0 {
        return Err(Error::Precondition("the interference-limited forms need zero noise".into()));
    }
    require_homogeneous(cfg)
}

/// `Z(x) = 2x ₂F₁(1, 1−δ; 2−δ; −x) / (α − 2)`.
fn z(alpha: f64, x: f64) -> f64 {
    2.0 * x * hyp2f1_delta(2.0 / alpha, x) / (alpha - 2.0)
}

fn far_rate(alpha: f64, split: NomaPowerSplit, settings: &QuadratureSettings) -> Result<f64> {
    let NomaPowerSplit { a_m, a_n } = split;
    let f = |t: f64| {
        let d = a_m - t * a_n;
        if d <= 0.0 {
            return 0.0;
        }
        let zm = z(alpha, t / d);
        0.5 / ((1.0 + t) * (1.0 + zm) * (1.0 + zm))
    };
    Ok(integrate_finite(f, 0.0, a_m / a_n, settings)?.value / LN_2)
}

/// `(1/ln2) ∫ dt / ((1+t)(c + Z(t/a)))`; `c = 2` for a NOMA near user, whose
/// partner shares the same serving law, and `c = 1` for a lone user.
fn near_rate(alpha: f64, a: f64, c: f64, settings: &QuadratureSettings) -> Result<f64> {
    let mut f = |t: f64| 1.0 / ((1.0 + t) * (c + z(alpha, t / a)));
    Ok(integrate_decaying_t(&mut f, 1.0, alpha, settings)?.value / LN_2)
}

/// Legitimate rates of tier `k` for random placement in the
/// interference-limited regime. Both cases coincide.
pub fn interference_limited_rates(cfg: &NetworkConfig, k: usize, settings: &QuadratureSettings) -> Result<LegitRates> {
    let alpha = preconditions(cfg, k)?;
    if !cfg.noma_active(k) {
        return Ok(LegitRates { r_n_case2: near_rate(alpha, 1.0, 1.0, settings)?, ..Default::default() });
    }
    let split = cfg.split;
    let r_m = far_rate(alpha, split, settings)?;
    let r_n = near_rate(alpha, split.a_n, 2.0, settings)?;
    Ok(LegitRates { r_m_case1: r_m, r_n_case1: r_n, r_n_case2: r_n, r_m_case2: r_m })
}

/// Leakage rate of the message of `role` in the interference-limited regime.
pub fn interference_limited_leakage(
    cfg: &NetworkConfig,
    k: usize,
    role: UserRole,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let alpha = preconditions(cfg, k)?;
    let a = cfg.effective_split(k).fraction(role);
    if a == 0.0 || cfg.eve_density == 0.0 {
        return Ok(0.0);
    }
    let delta = 2.0 / alpha;
    let p_k = cfg.tiers[k].power;
    let denom: f64 = cfg.tiers.iter().map(|t| t.density * (t.power / p_k).powf(delta) * gamma_pair_delta(delta)).sum();
    let b = cfg.eve_density * a.powf(delta) / denom;
    let mut f = |t: f64| -(-b * t.powf(-delta)).exp_m1() / (1.0 + t);
    Ok(integrate_decaying_t(&mut f, b.powf(1.0 / delta), alpha, settings)?.value / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::testutil::equal_alpha;
    use crate::model::dbm_to_linear;

    #[test]
    fn needs_zero_noise() {
        let s = QuadratureSettings::default();
        assert!(matches!(interference_limited_rates(&equal_alpha(1e-9), 0, &s), Err(Error::Precondition(_))));
        assert!(interference_limited_rates(&equal_alpha(0.0), 0, &s).is_ok());
    }

    #[test]
    fn independent_of_density_and_power() {
        let s = QuadratureSettings::default();
        let base = equal_alpha(0.0);
        let mut scaled = base.clone();
        for t in &mut scaled.tiers {
            t.density *= 10.0;
            t.power *= dbm_to_linear(3.0);
        }
        for k in 0..2 {
            let a = interference_limited_rates(&base, k, &s).unwrap();
            let b = interference_limited_rates(&scaled, k, &s).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn leakage_vanishes_without_eavesdroppers() {
        let mut c = equal_alpha(0.0);
        c.eve_density = 0.0;
        let s = QuadratureSettings::default();
        assert_eq!(interference_limited_leakage(&c, 0, UserRole::Near, &s).unwrap(), 0.0);
    }

    #[test]
    fn alpha_four_split_values() {
        // frozen from an independent quadrature of the same single integrals
        let c = equal_alpha(0.0);
        let r = interference_limited_rates(&c, 0, &QuadratureSettings::default().with_rel_tol(1e-10)).unwrap();
        assert!((r.r_m_case1 - 0.20162).abs() < 1e-4, "{}", r.r_m_case1);
        assert!((r.r_n_case1 - 1.14346).abs() < 1e-4, "{}", r.r_n_case1);
    }
}
