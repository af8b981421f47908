//! Association statistics and serving-distance laws under maximum biased
//! average received power association.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::specialfn::{integrate_finite, QuadratureSettings};

/// Exponent `h(r)` at which radial integrals are cut off; `e^{-50}` is far
/// below every tolerance used.
const TRUNCATION_EXPONENT: f64 = 50.0;

/// Parameters of interfering tier `j` relative to serving tier `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierRatios {
    pub p_hat: f64,
    pub b_hat: f64,
    pub a_hat: f64,
}

impl TierRatios {
    pub fn new(cfg: &NetworkConfig, k: usize, j: usize) -> Self {
        let (tk, tj) = (&cfg.tiers[k], &cfg.tiers[j]);
        Self { p_hat: tj.power / tk.power, b_hat: tj.bias / tk.bias, a_hat: tj.alpha / tk.alpha }
    }
}

/// Distance from a user at `r_u` (served by tier `k`) to the closest
/// permissible base station of tier `j`.
///
/// Panics if either index is out of range.
pub fn nearest_interferer_distance(cfg: &NetworkConfig, k: usize, j: usize, r_u: f64) -> f64 {
    let q = TierRatios::new(cfg, k, j);
    (q.p_hat * q.b_hat).powf(1.0 / cfg.tiers[j].alpha) * r_u.powf(1.0 / q.a_hat)
}

/// Mean aggregate interference (mW) at a user served by tier `k` at distance
/// `r_u`, from all base stations outside the exclusion discs.
pub fn mean_interference(cfg: &NetworkConfig, k: usize, r_u: f64) -> f64 {
    cfg.tiers
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let y = nearest_interferer_distance(cfg, k, j, r_u);
            2.0 * PI * t.power * t.density / (t.alpha - 2.0) * y.powf(2.0 - t.alpha)
        })
        .sum()
}

fn check_tier(cfg: &NetworkConfig, k: usize) -> Result<()> {
    if k < cfg.num_tiers() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tier {k} out of range for {} tiers", cfg.num_tiers())))
    }
}

/// Law of the distance between a typical user and its serving base station,
/// given that it associates with tier `k`.
///
/// The void probability exponent is `h(r) = Σ_j c_j r^{e_j}` with
/// `c_j = πλ_j (P̂_j B̂_j)^{2/α_j}` and `e_j = 2α_k/α_j`.
#[derive(Debug, Clone)]
pub struct ServingLaw {
    density: f64,
    terms: Vec<(f64, f64)>,
    /// `Σ c_j` when every exponent is 2, where the law is Rayleigh.
    rayleigh: Option<f64>,
    association: f64,
    r_trunc: f64,
}

impl ServingLaw {
    pub fn new(cfg: &NetworkConfig, k: usize) -> Result<Self> {
        check_tier(cfg, k)?;
        let alpha_k = cfg.tiers[k].alpha;
        let terms: Vec<(f64, f64)> = (0..cfg.num_tiers())
            .map(|j| {
                let q = TierRatios::new(cfg, k, j);
                let t = &cfg.tiers[j];
                (PI * t.density * (q.p_hat * q.b_hat).powf(2.0 / t.alpha), 2.0 * alpha_k / t.alpha)
            })
            .collect();
        let rayleigh = terms.iter().all(|&(_, e)| e == 2.0).then(|| terms.iter().map(|&(c, _)| c).sum());
        let mut law = Self { density: cfg.tiers[k].density, terms, rayleigh, association: f64::NAN, r_trunc: f64::NAN };
        law.r_trunc = law.radius_at_exponent(TRUNCATION_EXPONENT);
        let settings = QuadratureSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_subdivisions: 400,
            ..QuadratureSettings::default()
        };
        let integral = integrate_finite(|r| r * (-law.exponent(r)).exp(), 0.0, law.r_trunc, &settings)?;
        law.association = 2.0 * PI * law.density * integral.value;
        Ok(law)
    }

    /// `h(r)`, so that the pdf is `(2πλ_k/A_k) r e^{-h(r)}`.
    pub fn exponent(&self, r: f64) -> f64 {
        match self.rayleigh {
            Some(e) => e * r * r,
            None => self.terms.iter().map(|&(c, e)| c * r.powf(e)).sum(),
        }
    }

    /// Probability that a typical user associates with this tier.
    pub fn association(&self) -> f64 {
        self.association
    }

    /// Radius beyond which the density is negligible.
    pub fn truncation_radius(&self) -> f64 {
        self.r_trunc
    }

    /// Solves `h(r) = target` for `r`.
    pub fn radius_at_exponent(&self, target: f64) -> f64 {
        if let Some(e) = self.rayleigh {
            return (target / e).sqrt();
        }
        solve_increasing(|r| self.exponent(r) - target, 1e-13)
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        2.0 * PI * self.density / self.association * r * (-self.exponent(r)).exp()
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        if let Some(e) = self.rayleigh {
            return Ok(-(-e * r * r).exp_m1());
        }
        if r >= self.r_trunc {
            return Ok(1.0);
        }
        if self.exponent(r) < 1.0 {
            Ok(self.mass(0.0, r)?)
        } else {
            Ok(1.0 - self.mass(r, self.r_trunc)?)
        }
    }

    /// `1 − F(r)`, computed without cancellation in the tail.
    pub fn survivor(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(1.0);
        }
        if let Some(e) = self.rayleigh {
            return Ok((-e * r * r).exp());
        }
        if r >= self.r_trunc {
            return Ok(0.0);
        }
        if self.exponent(r) < 1.0 {
            Ok(1.0 - self.mass(0.0, r)?)
        } else {
            self.mass(r, self.r_trunc)
        }
    }

    fn mass(&self, a: f64, b: f64) -> Result<f64> {
        let settings = QuadratureSettings { rel_tol: 1e-10, abs_tol: 1e-15, ..Default::default() };
        Ok(integrate_finite(|r| self.pdf(r), a, b, &settings)?.value)
    }
}

/// Positive root of a continuous function that is negative near 0 and
/// increases to positive values, to relative precision `rel`.
pub(crate) fn solve_increasing(f: impl Fn(f64) -> f64, rel: f64) -> f64 {
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return hi;
        }
    }
    let mut lo = hi;
    while f(lo) >= 0.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    if f(lo) >= 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel * hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Probability that a typical user associates with tier `k`.
pub fn association_probability(cfg: &NetworkConfig, k: usize) -> Result<f64> {
    Ok(ServingLaw::new(cfg, k)?.association())
}

/// Density of the serving distance for a user associated with tier `k`.
pub fn serving_distance_pdf(cfg: &NetworkConfig, k: usize, r: f64) -> Result<f64> {
    Ok(ServingLaw::new(cfg, k)?.pdf(r))
}

/// Distribution function of the serving distance for tier `k`.
pub fn serving_distance_cdf(cfg: &NetworkConfig, k: usize, r: f64) -> Result<f64> {
    ServingLaw::new(cfg, k)?.cdf(r)
}
