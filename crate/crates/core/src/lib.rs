//! Ergodic secrecy rate of K-tier heterogeneous cellular networks in which
//! every base station serves a pair of users with power-domain NOMA while
//! passive eavesdroppers listen in.
//!
//! Base stations, users and eavesdroppers are modelled by homogeneous Poisson
//! point processes. Two independent engines compute the same quantities:
//!
//! * [`analytic`] evaluates the integral and closed-form expressions for the
//!   legitimate rates, their lower bounds, the eavesdropper leakage rates and
//!   the combined secrecy rate by adaptive quadrature.
//! * [`montecarlo`] drops network snapshots and averages instantaneous rates.
//!
//! [`experiments`] drives parameter sweeps over either engine and writes CSV.

// `!(x > 0.0)` style guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod model;
pub mod montecarlo;
pub mod specialfn;

pub use error::{Error, Result};
pub use model::{
    dbm_to_linear, linear_to_dbm, FirstUserPlacement, NetworkConfig, NomaPowerSplit, RateBreakdown, TierParams,
    TierRates,
};
