use std::fmt;

use crate::specialfn::Integral;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Invalid(ValidationErrors),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error(
        "quadrature did not reach tolerance (best value {}, estimated error {})",
        .best.value, .best.abs_error
    )]
    ToleranceNotReached { best: Integral },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("bad sweep spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A single failed invariant found by [`crate::model::NetworkConfig::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    /// Path-loss exponent of the given tier is not strictly greater than 2.
    AlphaTooSmall { tier: usize, alpha: f64 },
    /// NOMA split does not sum to one, or gives the far user less power.
    BadSplit { a_m: f64, a_n: f64 },
    /// A quantity that must be positive (or non-negative) is not.
    NonPositiveParameter { name: String, value: f64 },
    /// The tier list is empty.
    NoTiers,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlphaTooSmall { tier, alpha } => {
                write!(f, "tier {tier}: path-loss exponent {alpha} must exceed 2")
            }
            Self::BadSplit { a_m, a_n } => {
                write!(f, "power split ({a_m}, {a_n}) must satisfy a_m + a_n = 1 and a_m >= a_n")
            }
            Self::NonPositiveParameter { name, value } => {
                write!(f, "{name} = {value} is out of range")
            }
            Self::NoTiers => write!(f, "at least one tier is required"),
        }
    }
}

/// Every issue found during validation, in discovery order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationErrors(pub Vec<ValidationIssue>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}
