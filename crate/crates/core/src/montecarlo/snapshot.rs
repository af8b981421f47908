use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Exp1;

use super::field::{path_gain, strongest_eavesdropper, user_interference};
use super::SimWindow;
use crate::model::{CaseLabel, FirstUserPlacement, NetworkConfig, NomaPowerSplit, UserRole};

/// One network snapshot for a pair served by a given tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub tier: usize,
    /// Single-user tiers always report `CaseII`, so the lone user's rate
    /// lands in the second-case near-user slot.
    pub case: CaseLabel,
    pub r_a: f64,
    /// Second-user distance; zero when the tier serves one user.
    pub r_s: f64,
    /// Far user decoding its own message.
    pub sinr_mm: f64,
    /// Near user decoding the far user's message before SIC.
    pub sinr_nm: f64,
    /// Near user decoding its own message after SIC.
    pub sinr_nn: f64,
    /// Largest `P g d^{-α} / (I + σ²)` over eavesdroppers, before the power
    /// fraction of the message.
    pub eve_sinr: f64,
    pub split: NomaPowerSplit,
    /// Draws discarded because no base station fell in the window.
    pub resampled: u64,
}

impl Snapshot {
    /// Instantaneous rates of the far and the near user.
    pub fn rates(&self) -> (f64, f64) {
        ((1.0 + self.sinr_mm.min(self.sinr_nm)).log2(), (1.0 + self.sinr_nn).log2())
    }

    /// SINR of the message of `role` at the strongest eavesdropper.
    pub fn eve_sinr_for(&self, role: UserRole) -> f64 {
        self.split.fraction(role) * self.eve_sinr
    }

    pub fn leak_m(&self) -> f64 {
        (1.0 + self.eve_sinr_for(UserRole::Far)).log2()
    }

    pub fn leak_n(&self) -> f64 {
        (1.0 + self.eve_sinr_for(UserRole::Near)).log2()
    }
}

/// Nearest base station of each tier around a typical user; returns the
/// tier with the largest biased received power and its distance, or `None`
/// when every tier is empty inside the window.
fn nearest_winner<R: Rng>(cfg: &NetworkConfig, window: &SimWindow, rng: &mut R) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, t) in cfg.tiers.iter().enumerate() {
        let e: f64 = rng.sample(Exp1);
        let r2 = e / (PI * t.density);
        if r2 > window.radius * window.radius {
            continue;
        }
        let metric = t.power * t.bias * path_gain(r2, t.alpha);
        if best.is_none_or(|(_, _, m)| metric > m) {
            best = Some((j, r2.sqrt(), metric));
        }
    }
    best.map(|(j, r, _)| (j, r))
}

/// Serving tier of a typical user, with the number of degenerate draws.
pub fn draw_association<R: Rng>(cfg: &NetworkConfig, window: &SimWindow, rng: &mut R) -> (usize, u64) {
    let mut degenerate = 0;
    loop {
        match nearest_winner(cfg, window, rng) {
            Some((j, _)) => return (j, degenerate),
            None => degenerate += 1,
        }
    }
}

/// Distance to the serving base station of a user conditioned on tier `k`
/// serving it, by rejection.
fn serving_distance<R: Rng>(
    cfg: &NetworkConfig,
    k: usize,
    window: &SimWindow,
    rng: &mut R,
    degenerate: &mut u64,
) -> f64 {
    loop {
        match nearest_winner(cfg, window, rng) {
            Some((j, r)) if j == k => return r,
            Some(_) => {}
            None => *degenerate += 1,
        }
    }
}

/// Draws one snapshot of a pair served by tier `k`.
///
/// The first user is placed per `placement`, the second user is drawn
/// independently from the serving-distance law of the tier, and each user
/// sees its own interference field beyond its association exclusion radii.
/// Eavesdroppers form a PPP around the serving base station.
pub fn simulate_realization<R: Rng>(
    cfg: &NetworkConfig,
    k: usize,
    placement: FirstUserPlacement,
    window: &SimWindow,
    rng: &mut R,
) -> Snapshot {
    let tier = &cfg.tiers[k];
    let split = cfg.effective_split(k);
    let noise = cfg.noise;
    let mut resampled = 0;
    let r_a = match placement {
        FirstUserPlacement::Fixed(r) => r,
        FirstUserPlacement::Random => serving_distance(cfg, k, window, rng, &mut resampled),
    };
    let signal = |r: f64, g: f64| tier.power * g * path_gain(r * r, tier.alpha);

    let (case, r_s, sinr_mm, sinr_nm, sinr_nn) = if cfg.noma_active(k) {
        let r_s = serving_distance(cfg, k, window, rng, &mut resampled);
        let case = CaseLabel::classify(r_s, r_a);
        let (r_far, r_near) = match case {
            CaseLabel::CaseI => (r_a, r_s),
            CaseLabel::CaseII => (r_s, r_a),
        };
        let (g_far, g_near): (f64, f64) = (rng.sample(Exp1), rng.sample(Exp1));
        let (seed_far, seed_near): (u64, u64) = (rng.random(), rng.random());
        let i_far = user_interference(cfg, k, r_far, window, seed_far);
        let i_near = user_interference(cfg, k, r_near, window, seed_near);
        let (s_far, s_near) = (signal(r_far, g_far), signal(r_near, g_near));
        let NomaPowerSplit { a_m, a_n } = split;
        (
            case,
            r_s,
            a_m * s_far / (a_n * s_far + i_far + noise),
            a_m * s_near / (a_n * s_near + i_near + noise),
            a_n * s_near / (i_near + noise),
        )
    } else {
        let g: f64 = rng.sample(Exp1);
        let seed: u64 = rng.random();
        let i = user_interference(cfg, k, r_a, window, seed);
        (CaseLabel::CaseII, 0.0, 0.0, 0.0, signal(r_a, g) / (i + noise))
    };
    let eve_sinr = if cfg.eve_density > 0.0 { strongest_eavesdropper(cfg, k, window, rng) } else { 0.0 };
    Snapshot { tier: k, case, r_a, r_s, sinr_mm, sinr_nm, sinr_nn, eve_sinr, split, resampled }
}
