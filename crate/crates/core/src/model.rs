//! Network description shared by both engines.
//!
//! Units: powers in milliwatts, densities in points per square metre,
//! distances in metres, rates in bits/s/Hz.

use crate::error::{Error, Result, ValidationErrors, ValidationIssue};

/// Tolerance on `a_m + a_n = 1`.
const SPLIT_EPS: f64 = 1e-12;

/// Converts a power in dBm to milliwatts.
pub fn dbm_to_linear(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts a power in milliwatts to dBm.
pub fn linear_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// One tier of base stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierParams {
    /// Transmit power in mW.
    pub power: f64,
    /// Base-station intensity per m².
    pub density: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Association bias factor.
    pub bias: f64,
}

impl TierParams {
    pub fn new(power: f64, density: f64, alpha: f64, bias: f64) -> Self {
        Self { power, density, alpha, bias }
    }

    pub fn from_dbm(power_dbm: f64, density: f64, alpha: f64, bias: f64) -> Self {
        Self::new(dbm_to_linear(power_dbm), density, alpha, bias)
    }
}

/// Fraction of the transmit power given to the far (`a_m`) and near (`a_n`)
/// user of a NOMA pair. The same split is used by every tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaPowerSplit {
    pub a_m: f64,
    pub a_n: f64,
}

impl NomaPowerSplit {
    /// Single-user transmission: the far user gets nothing.
    pub const OMA: Self = Self { a_m: 0.0, a_n: 1.0 };

    pub fn new(a_m: f64, a_n: f64) -> Self {
        Self { a_m, a_n }
    }

    pub fn is_oma(&self) -> bool {
        self.a_m == 0.0
    }

    /// Power fraction carried by the message of `role`.
    pub fn fraction(&self, role: UserRole) -> f64 {
        match role {
            UserRole::Far => self.a_m,
            UserRole::Near => self.a_n,
        }
    }

    fn is_valid_noma(&self) -> bool {
        self.a_m.is_finite()
            && self.a_n.is_finite()
            && self.a_n > 0.0
            && (self.a_m + self.a_n - 1.0).abs() <= SPLIT_EPS
            && self.a_m >= self.a_n
    }
}

/// Which user of the NOMA pair a quantity refers to. User `m` is always the
/// farther one and decodes only its own message; user `n` is nearer and
/// cancels `m`'s message before decoding its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserRole {
    Far,
    Near,
}

/// Whether the randomly drawn second user ended up nearer (`CaseI`) or
/// farther (`CaseII`) from the base station than the associated user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    CaseI,
    CaseII,
}

impl CaseLabel {
    /// Case for a second user at `r_s` paired with an associated user at `r_a`.
    pub fn classify(r_s: f64, r_a: f64) -> Self {
        if r_s <= r_a {
            Self::CaseI
        } else {
            Self::CaseII
        }
    }
}

/// Distance between the first (associated) user and its base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstUserPlacement {
    /// Conditioned on a known radius in metres.
    Fixed(f64),
    /// Drawn from the serving-distance law of the tier.
    Random,
}

/// Complete scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub tiers: Vec<TierParams>,
    /// Noise power σ² in mW; zero selects the interference-limited regime.
    pub noise: f64,
    pub split: NomaPowerSplit,
    /// Eavesdropper intensity per m².
    pub eve_density: f64,
    /// Per-tier NOMA switch; a disabled tier serves a single user at full power.
    pub tier_noma: Vec<bool>,
    /// Single-user transmission in every tier.
    pub oma_mode: bool,
}

impl NetworkConfig {
    /// A NOMA-everywhere configuration.
    pub fn new(tiers: Vec<TierParams>, noise: f64, split: NomaPowerSplit, eve_density: f64) -> Self {
        let k = tiers.len();
        Self { tiers, noise, split, eve_density, tier_noma: vec![true; k], oma_mode: false }
    }

    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    /// Whether tier `k` pairs two users.
    pub fn noma_active(&self, k: usize) -> bool {
        !self.oma_mode && self.tier_noma.get(k).copied().unwrap_or(true)
    }

    /// Split actually used in tier `k`: the configured one when NOMA is active,
    /// otherwise all power to the single served user.
    pub fn effective_split(&self, k: usize) -> NomaPowerSplit {
        if self.noma_active(k) {
            self.split
        } else {
            NomaPowerSplit::OMA
        }
    }

    /// Common path-loss exponent, if all tiers share one.
    pub fn common_alpha(&self) -> Option<f64> {
        let first = self.tiers.first()?.alpha;
        self.tiers.iter().all(|t| t.alpha == first).then_some(first)
    }

    /// Whether every tier has the same bias (all bias ratios equal one).
    pub fn unbiased(&self) -> bool {
        match self.tiers.first() {
            Some(first) => self.tiers.iter().all(|t| t.bias == first.bias),
            None => true,
        }
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(ValidationErrors(issues)))
        }
    }

    pub fn issues(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let mut positive = |name: String, value: f64| {
            if !(value > 0.0 && value.is_finite()) {
                issues.push(ValidationIssue::NonPositiveParameter { name, value });
            }
        };
        for (k, t) in self.tiers.iter().enumerate() {
            positive(format!("tier[{k}].power"), t.power);
            positive(format!("tier[{k}].density"), t.density);
            positive(format!("tier[{k}].bias"), t.bias);
        }
        for (name, value) in [("noise", self.noise), ("eve_density", self.eve_density)] {
            if !(value >= 0.0 && value.is_finite()) {
                issues.push(ValidationIssue::NonPositiveParameter { name: name.into(), value });
            }
        }
        if self.tiers.is_empty() {
            issues.push(ValidationIssue::NoTiers);
        }
        for (tier, t) in self.tiers.iter().enumerate() {
            if !(t.alpha > 2.0 && t.alpha.is_finite()) {
                issues.push(ValidationIssue::AlphaTooSmall { tier, alpha: t.alpha });
            }
        }
        if self.tier_noma.len() != self.tiers.len() {
            issues.push(ValidationIssue::NonPositiveParameter {
                name: "tier_noma length".into(),
                value: self.tier_noma.len() as f64,
            });
        }
        let needs_split = !self.oma_mode && self.tier_noma.iter().any(|&on| on);
        let split_ok = self.split.is_valid_noma() || !needs_split && self.split == NomaPowerSplit::OMA;
        if !split_ok {
            issues.push(ValidationIssue::BadSplit { a_m: self.split.a_m, a_n: self.split.a_n });
        }
        issues
    }
}

/// The rate components of one tier. `T` is `f64` for the analytic engine and
/// an estimate with a standard error for the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TierRates<T> {
    /// Probability that a typical user associates with this tier.
    pub association: T,
    pub r_m_case1: T,
    pub r_n_case1: T,
    pub r_n_case2: T,
    pub r_m_case2: T,
    /// Leakage of the far user's message to the strongest eavesdropper.
    pub leak_m: T,
    /// Leakage of the near user's message to the strongest eavesdropper.
    pub leak_n: T,
}

impl<T> TierRates<T> {
    /// Component names in CSV column order.
    pub const FIELDS: [&'static str; 7] =
        ["assoc", "r_m_case1", "r_n_case1", "r_n_case2", "r_m_case2", "leak_m", "leak_n"];

    pub fn as_array(&self) -> [&T; 7] {
        [
            &self.association,
            &self.r_m_case1,
            &self.r_n_case1,
            &self.r_n_case2,
            &self.r_m_case2,
            &self.leak_m,
            &self.leak_n,
        ]
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> TierRates<U> {
        TierRates {
            association: f(&self.association),
            r_m_case1: f(&self.r_m_case1),
            r_n_case1: f(&self.r_n_case1),
            r_n_case2: f(&self.r_n_case2),
            r_m_case2: f(&self.r_m_case2),
            leak_m: f(&self.leak_m),
            leak_n: f(&self.leak_n),
        }
    }
}

fn clip(x: f64) -> f64 {
    x.max(0.0)
}

impl TierRates<f64> {
    /// Secrecy rates of the two cases, `[R_n - R_e^n]^+ + [R_m - R_e^m]^+`.
    pub fn case_secrecy(&self) -> (f64, f64) {
        let one = clip(self.r_n_case1 - self.leak_n) + clip(self.r_m_case1 - self.leak_m);
        let two = clip(self.r_n_case2 - self.leak_n) + clip(self.r_m_case2 - self.leak_m);
        (one, two)
    }

    /// Secrecy rate of the tier, not weighted by its association probability.
    pub fn tier_secrecy(&self) -> f64 {
        let (one, two) = self.case_secrecy();
        one + two
    }
}

/// Per-tier components plus the network-wide ergodic secrecy rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown<T = f64> {
    pub tiers: Vec<TierRates<T>>,
    pub secrecy_total: T,
}

/// Association-weighted sum of the clipped per-tier secrecy rates.
pub fn combine_secrecy(tiers: &[TierRates<f64>]) -> f64 {
    tiers.iter().map(|t| t.association * t.tier_secrecy()).sum()
}

impl RateBreakdown<f64> {
    pub fn from_tiers(tiers: Vec<TierRates<f64>>) -> Self {
        let secrecy_total = combine_secrecy(&tiers);
        Self { tiers, secrecy_total }
    }

    pub fn association_sum(&self) -> f64 {
        self.tiers.iter().map(|t| t.association).sum()
    }
}
