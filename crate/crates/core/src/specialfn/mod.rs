//! Special functions and quadrature used by the analytic engine.

mod quadrature;

pub use quadrature::{integrate_finite, integrate_semi_infinite, Integral, QuadratureSettings, TailMap};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this argument the Pfaff-transformed series is summed directly; above
/// it the expansion in `1/x` converges faster.
const PFAFF_SWITCH: f64 = 3.0;
const SERIES_MAX_TERMS: usize = 1000;

/// `₂F₁(1, 1 − 2/α; 2 − 2/α; −x)` for `α > 2` and `x ≥ 0`.
///
/// The value lies in `(0, 1]`, equals one at `x = 0` and decreases in `x`.
pub fn hyp2f1_special(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 2.0) || alpha.is_nan() {
        return Err(Error::Domain(format!("path-loss exponent {alpha} must exceed 2")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("hypergeometric argument {x} must be non-negative")));
    }
    Ok(hyp2f1_delta(2.0 / alpha, x))
}

/// Same function parameterised by `δ = 2/α ∈ (0, 1)`; no argument checks.
pub(crate) fn hyp2f1_delta(delta: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x <= PFAFF_SWITCH {
        // Pfaff: ₂F₁(1,b;c;−x) = (1+x)⁻¹ ₂F₁(1,c−b;c;x/(1+x)), and c − b = 1 here,
        // so the series terms are n!/(c)_n zⁿ.
        let c = 2.0 - delta;
        let z = x / (1.0 + x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..SERIES_MAX_TERMS {
            let n = n as f64;
            term *= (n + 1.0) / (c + n) * z;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / (1.0 + x)
    } else {
        // Connection to 1/x: Γ(2−δ)Γ(δ) x^(δ−1) − (1−δ)/δ · x⁻¹ ₂F₁(1,δ;1+δ;−1/x).
        let y = -1.0 / x;
        let mut power = 1.0;
        let mut sum = 0.0;
        for n in 0..SERIES_MAX_TERMS {
            let term = delta / (delta + n as f64) * power;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            power *= y;
        }
        let lead = (1.0 - delta) * PI / (PI * delta).sin() * x.powf(delta - 1.0);
        lead - (1.0 - delta) / delta * sum / x
    }
}

/// `Γ(1 + 2/α) Γ(1 − 2/α)`, evaluated through the reflection formula
/// `Γ(1+u)Γ(1−u) = πu / sin(πu)`.
pub fn gamma_pair(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::Domain(format!("path-loss exponent {alpha} must exceed 2")));
    }
    Ok(gamma_pair_delta(2.0 / alpha))
}

pub(crate) fn gamma_pair_delta(delta: f64) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    PI * delta / (PI * delta).sin()
}

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
