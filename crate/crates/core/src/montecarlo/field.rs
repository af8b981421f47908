//! Poisson point process generators.
//!
//! Points are produced radially, nearest first, from the cumulative sums of
//! unit exponentials: `π λ r_i² = π λ r_0² + Γ_i`. Extending the window only
//! appends points, so two windows driven by the same seed share every point
//! inside the smaller one.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::SimWindow;
use crate::geometry::nearest_interferer_distance;
use crate::model::NetworkConfig;

/// Squared distances of a PPP with the given intensity on the annulus
/// `inner ≤ r ≤ outer`, in increasing order.
pub(crate) struct RadialPpp<'a, R> {
    rng: &'a mut R,
    r2: f64,
    outer2: f64,
    scale: f64,
}

impl<'a, R: Rng> RadialPpp<'a, R> {
    pub fn new(rng: &'a mut R, density: f64, inner: f64, outer: f64) -> Self {
        let scale = if density > 0.0 { 1.0 / (PI * density) } else { f64::INFINITY };
        Self { rng, r2: inner * inner, outer2: outer * outer, scale }
    }
}

impl<R: Rng> Iterator for RadialPpp<'_, R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if !self.scale.is_finite() {
            return None;
        }
        let step: f64 = self.rng.sample(Exp1);
        self.r2 += step * self.scale;
        (self.r2 <= self.outer2).then_some(self.r2)
    }
}

/// `r^{-α}` from `r²`.
#[inline]
pub(crate) fn path_gain(r2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (r2 * r2)
    } else {
        r2.powf(-0.5 * alpha)
    }
}

/// Points of a homogeneous PPP on the simulation disc, centred at the origin.
pub fn sample_hppp<R: Rng>(rng: &mut R, density: f64, window: &SimWindow) -> Vec<(f64, f64)> {
    let radii: Vec<f64> = RadialPpp::new(rng, density, 0.0, window.radius).collect();
    radii
        .into_iter()
        .map(|r2| {
            let theta = 2.0 * PI * rng.random::<f64>();
            let r = r2.sqrt();
            (r * theta.cos(), r * theta.sin())
        })
        .collect()
}

fn tier_rng(seed: u64, tier: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tier as u64);
    rng
}

/// Aggregate interference (mW) at a user served by tier `k` at distance
/// `r_u`: Rayleigh-faded signals from every base station of tier `j` beyond
/// the association exclusion radius `y_j(r_u)`, up to the window edge.
pub fn user_interference(cfg: &NetworkConfig, k: usize, r_u: f64, window: &SimWindow, seed: u64) -> f64 {
    let mut total = 0.0;
    for (j, t) in cfg.tiers.iter().enumerate() {
        let y = nearest_interferer_distance(cfg, k, j, r_u);
        let mut rng = tier_rng(seed, j);
        let mut gains = tier_rng(seed, j + cfg.num_tiers());
        for r2 in RadialPpp::new(&mut rng, t.density, y, window.radius) {
            let g: f64 = gains.sample(Exp1);
            total += t.power * g * path_gain(r2, t.alpha);
        }
    }
    total
}

/// Aggregate interference at an eavesdropper from every base station within
/// the window around it, with no exclusion region. Stops and returns `None`
/// as soon as the partial sum exceeds `limit`.
pub fn eve_interference_until(cfg: &NetworkConfig, window: &SimWindow, seed: u64, limit: f64) -> Option<f64> {
    let mut total = 0.0;
    for (j, t) in cfg.tiers.iter().enumerate() {
        let mut rng = tier_rng(seed, j);
        let mut gains = tier_rng(seed, j + cfg.num_tiers());
        for r2 in RadialPpp::new(&mut rng, t.density, 0.0, window.radius) {
            let g: f64 = gains.sample(Exp1);
            total += t.power * g * path_gain(r2, t.alpha);
            if total > limit {
                return None;
            }
        }
    }
    Some(total)
}

/// Full aggregate interference at an eavesdropper.
pub fn eve_interference(cfg: &NetworkConfig, window: &SimWindow, seed: u64) -> f64 {
    eve_interference_until(cfg, window, seed, f64::INFINITY).unwrap_or(f64::INFINITY)
}

/// Largest `S/(I + σ²)` over a PPP of eavesdroppers around a base station of
/// tier `k` at the origin, each with its own interference field. Zero when
/// there is no eavesdropper in the window.
pub(crate) fn strongest_eavesdropper<R: Rng>(cfg: &NetworkConfig, k: usize, window: &SimWindow, rng: &mut R) -> f64 {
    let serving = &cfg.tiers[k];
    let seed: u64 = rng.random();
    let mut eve_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eves: Vec<(f64, u64)> = Vec::new();
    let mut radial = ChaCha8Rng::seed_from_u64(seed);
    radial.set_stream(1);
    for r2 in RadialPpp::new(&mut radial, cfg.eve_density, 0.0, window.radius) {
        let g: f64 = eve_rng.sample(Exp1);
        let field_seed: u64 = eve_rng.random();
        eves.push((serving.power * g * path_gain(r2, serving.alpha), field_seed));
    }
    eves.sort_by(|a, b| b.0.total_cmp(&a.0));
    let noise = cfg.noise;
    let mut best = 0.0f64;
    for (signal, field_seed) in eves {
        if signal <= best * noise {
            // even a noise-only link cannot beat the current best
            break;
        }
        let limit = if best > 0.0 { signal / best - noise } else { f64::INFINITY };
        if let Some(i) = eve_interference_until(cfg, window, field_seed, limit) {
            best = best.max(signal / (i + noise));
        }
    }
    best
}
