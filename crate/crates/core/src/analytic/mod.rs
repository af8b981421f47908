//! Numerical evaluation of the ergodic rate expressions.
//!
//! Every rate is an expectation of `log2(1 + SINR)` written as
//! `(1/ln 2) ∫ P(SINR > t) / (1 + t) dt`, with the success probability
//! expressed through Laplace transforms of the Poisson interference.

mod bounds;
mod laplace;
mod leakage;
mod legit;
mod limited;
mod secrecy;

use std::cell::RefCell;

pub use bounds::{closed_form_lower_bounds, legit_rate_lower_bounds};
pub use laplace::{laplace_eve_interference, laplace_user_interference};
pub use leakage::leakage_rate;
pub use legit::legit_rates;
pub use limited::{interference_limited_leakage, interference_limited_rates};
pub use secrecy::{ergodic_secrecy_rate, tier_rates, AnalyticOptions, Engine};

use crate::error::{Error, Result};
use crate::geometry::{solve_increasing, ServingLaw};
use crate::model::{FirstUserPlacement, NetworkConfig, NomaPowerSplit};
use crate::specialfn::{integrate_finite, integrate_semi_infinite, Integral, QuadratureSettings};
use laplace::UserField;

/// The four legitimate rates of a tier, in bits/s/Hz. Each is weighted by the
/// probability of its case, so the two cases of a role add up to the rate of
/// that role.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LegitRates {
    pub r_m_case1: f64,
    pub r_n_case1: f64,
    pub r_n_case2: f64,
    pub r_m_case2: f64,
}

impl LegitRates {
    pub fn as_array(&self) -> [f64; 4] {
        [self.r_m_case1, self.r_n_case1, self.r_n_case2, self.r_m_case2]
    }
}

/// Everything about tier `k` that the rate integrals need.
pub(crate) struct TierContext {
    pub law: ServingLaw,
    pub field: UserField,
    pub power: f64,
    pub alpha: f64,
    pub noise: f64,
    pub split: NomaPowerSplit,
    pub noma: bool,
}

impl TierContext {
    pub fn new(cfg: &NetworkConfig, k: usize) -> Result<Self> {
        cfg.validate()?;
        let law = ServingLaw::new(cfg, k)?;
        Ok(Self {
            law,
            field: UserField::new(cfg, k),
            power: cfg.tiers[k].power,
            alpha: cfg.tiers[k].alpha,
            noise: cfg.noise,
            split: cfg.effective_split(k),
            noma: cfg.noma_active(k),
        })
    }

    /// `ln P(S/(I + σ²) > x)` where the signal `S = P_k g r^{-α_k}` and
    /// `s = x r^{α_k} / P_k` folds the threshold and path loss together.
    pub fn log_success(&self, s: f64, r: f64) -> f64 {
        -s * self.noise + self.field.log_laplace(s, r)
    }

    /// `∫_0^∞ P(a P_k g r^{-α}/(I + σ²) > t) / (1 + t) dt`.
    pub fn single_user_integral(&self, a: f64, r: f64, settings: &QuadratureSettings) -> Result<Integral> {
        let c = r.powf(self.alpha) / (a * self.power);
        let mut f = |t: f64| (self.log_success(t * c, r)).exp() / (1.0 + t);
        let t_star = solve_increasing(|t| -self.log_success(t * c, r) - 1.0, 1e-3);
        integrate_decaying_t(&mut f, t_star, self.alpha, settings)
    }

    /// `∫_0^{a_m/a_n} P(far user decodable at r1 and at r2) / (1 + t) dt`.
    pub fn far_pair_integral(&self, r1: f64, r2: f64, settings: &QuadratureSettings) -> Result<Integral> {
        let NomaPowerSplit { a_m, a_n } = self.split;
        let (c1, c2) = (r1.powf(self.alpha) / self.power, r2.powf(self.alpha) / self.power);
        let f = |t: f64| {
            let d = a_m - t * a_n;
            if d <= 0.0 {
                return 0.0;
            }
            let q = t / d;
            (self.log_success(q * c1, r1) + self.log_success(q * c2, r2)).exp() / (1.0 + t)
        };
        integrate_finite(f, 0.0, a_m / a_n, settings)
    }
}

/// `∫_0^∞ f(t) dt` for an integrand that behaves like `1/(1+t)` up to about
/// `t_star` and then decays at least like `t^{-1-2/α}`.
pub(crate) fn integrate_decaying_t<F: FnMut(f64) -> f64>(
    f: &mut F,
    t_star: f64,
    alpha: f64,
    settings: &QuadratureSettings,
) -> Result<Integral> {
    let tail_power = alpha / 2.0;
    if t_star > 1.0 && t_star.is_finite() {
        let head = integrate_finite(&mut *f, 0.0, 1.0, settings)?;
        let rest = integrate_semi_infinite(&mut *f, 1.0, &settings.with_tail(t_star - 1.0, tail_power))?;
        Ok(Integral {
            value: head.value + rest.value,
            abs_error: head.abs_error + rest.abs_error,
            evaluations: head.evaluations + rest.evaluations,
        })
    } else {
        let scale = if t_star > 0.0 { t_star } else { 1.0 };
        integrate_semi_infinite(f, 0.0, &settings.with_tail(scale, tail_power))
    }
}

/// Records failures of integrals evaluated inside an outer integrand so the
/// outer result can report them.
#[derive(Default)]
pub(crate) struct Nested {
    failure: RefCell<Option<Error>>,
}

impl Nested {
    /// Value to feed the outer integrand: the inner estimate, best effort on
    /// failure.
    pub fn value(&self, inner: Result<Integral>) -> f64 {
        match inner {
            Ok(i) => i.value,
            Err(Error::ToleranceNotReached { best }) => {
                self.note(Error::ToleranceNotReached { best });
                best.value
            }
            Err(e) => {
                self.note(e);
                f64::NAN
            }
        }
    }

    pub fn fail(&self, e: Error) {
        self.note(e);
    }

    fn note(&self, e: Error) {
        let mut slot = self.failure.borrow_mut();
        if slot.is_none() {
            *slot = Some(e);
        }
    }

    /// Combines the outer result with any inner failure.
    pub fn finish(self, outer: Result<Integral>) -> Result<f64> {
        let outer = outer?;
        match self.failure.into_inner() {
            None => Ok(outer.value),
            Some(Error::ToleranceNotReached { .. }) => Err(Error::ToleranceNotReached { best: outer }),
            Some(e) => Err(e),
        }
    }
}

pub(crate) fn check_placement(placement: FirstUserPlacement) -> Result<()> {
    match placement {
        FirstUserPlacement::Fixed(r) if !(r > 0.0 && r.is_finite()) => {
            Err(Error::Domain(format!("first-user radius {r} must be finite and positive")))
        }
        _ => Ok(()),
    }
}

pub(crate) fn check_tier(cfg: &NetworkConfig, k: usize) -> Result<()> {
    if k < cfg.num_tiers() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tier {k} out of range for {} tiers", cfg.num_tiers())))
    }
}

/// Requires a common path-loss exponent and equal biases.
pub(crate) fn require_homogeneous(cfg: &NetworkConfig) -> Result<f64> {
    let alpha =
        cfg.common_alpha().ok_or_else(|| Error::Precondition("all tiers must share one path-loss exponent".into()))?;
    if !cfg.unbiased() {
        return Err(Error::Precondition("all tiers must use the same bias".into()));
    }
    Ok(alpha)
}
