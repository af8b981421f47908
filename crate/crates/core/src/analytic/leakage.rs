use std::f64::consts::{LN_2, PI};

use super::laplace::log_laplace_eve;
use super::{check_tier, integrate_decaying_t, Nested};
use crate::error::{Error, Result};
use crate::geometry::solve_increasing;
use crate::model::{NetworkConfig, UserRole};
use crate::specialfn::{integrate_finite, Integral, QuadratureSettings};

/// Ergodic rate at which the message of `role` in tier `k` leaks to the
/// strongest of a Poisson field of non-colluding eavesdroppers around the
/// serving base station.
pub fn leakage_rate(cfg: &NetworkConfig, k: usize, role: UserRole, settings: &QuadratureSettings) -> Result<f64> {
    check_tier(cfg, k)?;
    cfg.validate()?;
    let a = cfg.effective_split(k).fraction(role);
    if a == 0.0 || cfg.eve_density == 0.0 {
        return Ok(0.0);
    }
    let (p_k, alpha_k, noise) = (cfg.tiers[k].power, cfg.tiers[k].alpha, cfg.noise);

    // -ln P(eavesdropper at r sees SINR above t)
    let exponent = |t: f64, r: f64| {
        let s = t * r.powf(alpha_k) / (a * p_k);
        s * noise - log_laplace_eve(cfg, s)
    };
    let inner = settings.inner();
    // mean number of eavesdroppers whose SINR exceeds t
    let exceed = |t: f64| -> Result<Integral> {
        let r_cut = solve_increasing(|r| exponent(t, r) - 50.0, 1e-6);
        let scale = 2.0 * PI * cfg.eve_density;
        let scaled = |j: Integral| Integral { value: scale * j.value, abs_error: scale * j.abs_error, ..j };
        match integrate_finite(|r| r * (-exponent(t, r)).exp(), 0.0, r_cut, &inner) {
            Ok(j) => Ok(scaled(j)),
            Err(Error::ToleranceNotReached { best }) => Err(Error::ToleranceNotReached { best: scaled(best) }),
            Err(e) => Err(e),
        }
    };

    let t_star = crossing(|t| exceed(t).map_or(f64::NAN, |m| m.value));
    let nested = Nested::default();
    let mut f = |t: f64| -(-nested.value(exceed(t))).exp_m1() / (1.0 + t);
    let outer = integrate_decaying_t(&mut f, t_star, alpha_k, settings);
    Ok(nested.finish(outer)? / LN_2)
}

/// Rough location where a decreasing positive function crosses one.
pub(crate) fn crossing(g: impl Fn(f64) -> f64) -> f64 {
    let mut t = 1.0;
    let v = g(t);
    if !v.is_finite() {
        return 1.0;
    }
    let (mut lo, mut hi);
    if v > 1.0 {
        lo = t;
        loop {
            t *= 10.0;
            if g(t) <= 1.0 || t > 1e300 {
                break;
            }
            lo = t;
        }
        hi = t;
    } else {
        hi = t;
        loop {
            t /= 10.0;
            if g(t) > 1.0 || t < 1e-300 {
                break;
            }
            hi = t;
        }
        lo = t;
    }
    for _ in 0..8 {
        let mid = (lo * hi).sqrt();
        if g(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}
