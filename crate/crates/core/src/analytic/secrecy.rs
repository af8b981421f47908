use super::{
    check_tier, interference_limited_leakage, interference_limited_rates, leakage_rate, legit_rate_lower_bounds,
    legit_rates, LegitRates,
};
use crate::error::{Error, Result};
use crate::geometry::association_probability;
use crate::model::{FirstUserPlacement, NetworkConfig, RateBreakdown, TierRates, UserRole};
use crate::specialfn::QuadratureSettings;

/// How the legitimate rates are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Full integral expressions.
    Exact,
    /// Mean-interference lower bounds for the legitimate rates; leakage exact.
    /// The resulting secrecy rate is a lower bound on the exact one.
    LowerBound,
    /// Noise-free single-integral forms; random placement, common exponent
    /// and unbiased association only.
    InterferenceLimited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOptions {
    pub engine: Engine,
    pub quadrature: QuadratureSettings,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        Self { engine: Engine::Exact, quadrature: QuadratureSettings::default() }
    }
}

impl AnalyticOptions {
    pub fn new(engine: Engine) -> Self {
        Self { engine, ..Default::default() }
    }
}

/// All rate components of tier `k`.
pub fn tier_rates(
    cfg: &NetworkConfig,
    k: usize,
    placement: FirstUserPlacement,
    options: &AnalyticOptions,
) -> Result<TierRates<f64>> {
    check_tier(cfg, k)?;
    let s = &options.quadrature;
    let association = association_probability(cfg, k)?;
    let (legit, leak_m, leak_n): (LegitRates, f64, f64) = match options.engine {
        Engine::Exact | Engine::LowerBound => {
            let legit = if options.engine == Engine::Exact {
                legit_rates(cfg, k, placement, s)?
            } else {
                legit_rate_lower_bounds(cfg, k, placement, s)?
            };
            (legit, leakage_rate(cfg, k, UserRole::Far, s)?, leakage_rate(cfg, k, UserRole::Near, s)?)
        }
        Engine::InterferenceLimited => {
            if placement != FirstUserPlacement::Random {
                return Err(Error::Precondition(
                    "the interference-limited forms average over the first user's position".into(),
                ));
            }
            (
                interference_limited_rates(cfg, k, s)?,
                interference_limited_leakage(cfg, k, UserRole::Far, s)?,
                interference_limited_leakage(cfg, k, UserRole::Near, s)?,
            )
        }
    };
    Ok(TierRates {
        association,
        r_m_case1: legit.r_m_case1,
        r_n_case1: legit.r_n_case1,
        r_n_case2: legit.r_n_case2,
        r_m_case2: legit.r_m_case2,
        leak_m,
        leak_n,
    })
}

/// Ergodic secrecy rate of the whole network: the association-weighted sum
/// over tiers of `[R_n − R_e^n]^+ + [R_m − R_e^m]^+` for both cases, with the
/// clipping applied to ergodic rates.
pub fn ergodic_secrecy_rate(
    cfg: &NetworkConfig,
    placement: FirstUserPlacement,
    options: &AnalyticOptions,
) -> Result<RateBreakdown> {
    cfg.validate()?;
    let tiers = (0..cfg.num_tiers()).map(|k| tier_rates(cfg, k, placement, options)).collect::<Result<Vec<_>>>()?;
    Ok(RateBreakdown::from_tiers(tiers))
}
