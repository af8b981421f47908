//! Lower bounds on the legitimate rates obtained by moving the expectation
//! inside the logarithm, with the interference replaced by its mean.

use std::f64::consts::PI;

use super::{check_placement, check_tier, require_homogeneous, LegitRates};
use crate::error::Result;
use crate::geometry::{mean_interference, ServingLaw};
use crate::model::{FirstUserPlacement, NetworkConfig, NomaPowerSplit};
use crate::specialfn::{gamma, integrate_finite, QuadratureSettings};

/// Inverse-SINR moments entering the bounds.
struct Moments {
    /// Average over the near user in case I.
    near_case1: f64,
    /// Average over the first (or only) user.
    first: f64,
    /// Average over the far user in case II.
    far_case2: f64,
}

fn assemble(split: NomaPowerSplit, noma: bool, m: &Moments) -> LegitRates {
    let log2p = |x: f64| (1.0 + x).log2();
    if !noma {
        return LegitRates { r_n_case2: log2p(1.0 / m.first), ..Default::default() };
    }
    let NomaPowerSplit { a_m, a_n } = split;
    LegitRates {
        r_m_case1: log2p(a_m / (2.0 * a_n + m.near_case1 + m.first)),
        r_n_case1: log2p(a_n / m.near_case1),
        r_n_case2: log2p(a_n / m.first),
        r_m_case2: log2p(a_m / (2.0 * a_n + m.far_case2 + m.first)),
    }
}

/// Lower bounds on the four rates of [`super::legit_rates`], each a single
/// radial integral of the mean interference.
pub fn legit_rate_lower_bounds(
    cfg: &NetworkConfig,
    k: usize,
    placement: FirstUserPlacement,
    settings: &QuadratureSettings,
) -> Result<LegitRates> {
    check_tier(cfg, k)?;
    check_placement(placement)?;
    cfg.validate()?;
    let law = ServingLaw::new(cfg, k)?;
    let (p_k, alpha_k) = (cfg.tiers[k].power, cfg.tiers[k].alpha);
    // inverse SINR scale at distance r, before the power fraction
    let q = |r: f64| (mean_interference(cfg, k, r) + cfg.noise) * r.powf(alpha_k) / p_k;
    let r_max = law.truncation_radius();
    let weighted = |a: f64, b: f64, w: &dyn Fn(f64) -> f64| -> Result<f64> {
        if a >= b {
            return Ok(0.0);
        }
        Ok(integrate_finite(|r| q(r) * law.pdf(r) * w(r), a, b, settings)?.value)
    };
    let one = |_: f64| 1.0;
    let moments = match placement {
        FirstUserPlacement::Random => {
            let survivor = |r: f64| law.survivor(r).unwrap_or(f64::NAN);
            let cdf = |r: f64| law.cdf(r).unwrap_or(f64::NAN);
            Moments {
                near_case1: weighted(0.0, r_max, &survivor)?,
                first: weighted(0.0, r_max, &one)?,
                far_case2: weighted(0.0, r_max, &cdf)?,
            }
        }
        FirstUserPlacement::Fixed(rho) => Moments {
            near_case1: weighted(0.0, rho.min(r_max), &one)?,
            first: q(rho),
            far_case2: weighted(rho, r_max, &one)?,
        },
    };
    Ok(assemble(cfg.effective_split(k), cfg.noma_active(k), &moments))
}

/// Closed forms of [`legit_rate_lower_bounds`] for random placement when all
/// tiers share one path-loss exponent and one bias.
pub fn closed_form_lower_bounds(cfg: &NetworkConfig, k: usize) -> Result<LegitRates> {
    check_tier(cfg, k)?;
    cfg.validate()?;
    let alpha = require_homogeneous(cfg)?;
    let p_k = cfg.tiers[k].power;
    let e: f64 = cfg.tiers.iter().map(|t| PI * t.density * (t.power / p_k).powf(2.0 / alpha)).sum();
    let a_tilde = cfg.noise * gamma(alpha / 2.0 + 1.0) / (p_k * (2.0 * e).powf(alpha / 2.0));
    let h = 2f64.powf(alpha / 2.0);
    let moments = Moments {
        near_case1: 0.5 / (alpha - 2.0) + 0.5 * a_tilde,
        first: 2.0 / (alpha - 2.0) + h * a_tilde,
        far_case2: 1.5 / (alpha - 2.0) + (h - 0.5) * a_tilde,
    };
    Ok(assemble(cfg.effective_split(k), cfg.noma_active(k), &moments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::testutil::{baseline, equal_alpha};
    use crate::model::dbm_to_linear;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let s = QuadratureSettings::default().with_rel_tol(1e-9);
        for noise in [0.0, dbm_to_linear(-90.0), dbm_to_linear(-60.0)] {
            let c = equal_alpha(noise);
            for k in 0..2 {
                let a = closed_form_lower_bounds(&c, k).unwrap().as_array();
                let b = legit_rate_lower_bounds(&c, k, FirstUserPlacement::Random, &s).unwrap().as_array();
                for i in 0..4 {
                    assert!(rel(a[i], b[i]) < 1e-7, "noise={noise} k={k} i={i}: {} vs {}", a[i], b[i]);
                }
            }
        }
    }

    #[test]
    fn noiseless_near_bound() {
        let c = equal_alpha(0.0);
        let r = closed_form_lower_bounds(&c, 1).unwrap();
        let expected = (1.0 + 2.0 * 0.4 * 2.0f64).log2();
        assert!((r.r_n_case1 - expected).abs() < 1e-14);
        assert!(r.r_m_case1 >= r.r_m_case2);
    }

    #[test]
    fn closed_form_needs_homogeneous_tiers() {
        assert!(closed_form_lower_bounds(&baseline(), 0).is_err());
        let mut c = equal_alpha(0.0);
        c.tiers[1].bias = 4.0;
        assert!(closed_form_lower_bounds(&c, 0).is_err());
    }

    #[test]
    fn vanishing_near_power() {
        let mut c = baseline();
        let s = QuadratureSettings::default();
        let mut prev = f64::INFINITY;
        for a_n in [0.4, 0.1, 1e-3, 1e-6] {
            c.split = NomaPowerSplit::new(1.0 - a_n, a_n);
            let b = legit_rate_lower_bounds(&c, 1, FirstUserPlacement::Random, &s).unwrap();
            assert!(b.r_n_case1 < prev);
            prev = b.r_n_case1;
        }
        assert!(prev < 1e-4);
    }
}
