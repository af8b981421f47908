//! Monte Carlo estimation of the same rate components as [`crate::analytic`].
//!
//! Iteration `i` draws from a ChaCha8 stream `i` keyed by the master seed, and
//! iterations are grouped into fixed blocks that are reduced in block order.
//! Results are therefore bit-identical for a given seed whatever the thread
//! count.

mod field;
mod snapshot;

pub use field::{eve_interference, eve_interference_until, sample_hppp, user_interference};
pub use snapshot::{draw_association, simulate_realization, Snapshot};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CaseLabel, FirstUserPlacement, NetworkConfig, RateBreakdown, TierRates};

/// Simulation disc. User metrics put the typical user at the centre;
/// eavesdropper metrics put the serving base station there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimWindow {
    /// Radius in metres.
    pub radius: f64,
}

impl Default for SimWindow {
    fn default() -> Self {
        Self { radius: 1e4 }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOptions {
    pub iterations: u64,
    pub seed: u64,
    pub window: SimWindow,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self { iterations: 100_000, seed: 1, window: SimWindow::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub rates: RateBreakdown<Estimate>,
    /// Snapshots redrawn because no base station fell inside the window.
    pub degenerate: u64,
}

const BLOCK: u64 = 256;
const PER_TIER: usize = 7;

pub(crate) fn iteration_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Running first and second moments of a sample vector.
#[derive(Debug, Clone)]
struct Moments {
    n: u64,
    sum: Vec<f64>,
    /// Row-major `d × d` sums of products.
    cross: Vec<f64>,
    degenerate: u64,
}

impl Moments {
    fn new(d: usize) -> Self {
        Self { n: 0, sum: vec![0.0; d], cross: vec![0.0; d * d], degenerate: 0 }
    }

    fn push(&mut self, x: &[f64]) {
        let d = self.sum.len();
        self.n += 1;
        for i in 0..d {
            self.sum[i] += x[i];
            if x[i] != 0.0 {
                let row = &mut self.cross[i * d..(i + 1) * d];
                for j in 0..d {
                    row[j] += x[i] * x[j];
                }
            }
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        self.n += other.n;
        self.degenerate += other.degenerate;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
        self
    }

    fn mean(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.n as f64).collect()
    }

    /// Unbiased sample covariance.
    fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let d = self.sum.len();
        let n = self.n as f64;
        (self.cross[i * d + j] - self.sum[i] * self.sum[j] / n) / (n - 1.0)
    }
}

/// Runs `iterations` draws of `sample`, each writing a `d`-vector, and
/// returns the accumulated moments.
fn run<F>(d: usize, options: &MonteCarloOptions, sample: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) -> u64 + Sync,
{
    let n = options.iterations;
    let blocks = n.div_ceil(BLOCK);
    let partial: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut m = Moments::new(d);
            let mut x = vec![0.0; d];
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                let mut rng = iteration_rng(options.seed, i);
                x.iter_mut().for_each(|v| *v = 0.0);
                m.degenerate += sample(&mut rng, &mut x);
                m.push(&x);
            }
            m
        })
        .collect();
    partial.iter().fold(Moments::new(d), |acc, m| acc.merge(m))
}

fn check_options(options: &MonteCarloOptions) -> Result<()> {
    if options.iterations == 0 {
        return Err(Error::Domain("at least one iteration is required".into()));
    }
    if !(options.window.radius > 0.0 && options.window.radius.is_finite()) {
        return Err(Error::Domain(format!("window radius {} must be positive", options.window.radius)));
    }
    Ok(())
}

/// Estimates every rate component and the ergodic secrecy rate.
///
/// Each iteration draws one association of a typical user and, for every
/// tier, one snapshot conditioned on that tier serving the pair. Component
/// means are case-weighted exactly like the analytic rates; the secrecy rate
/// clips differences of the averaged rates, and its standard error comes
/// from the delta method.
pub fn estimate_rates(
    cfg: &NetworkConfig,
    placement: FirstUserPlacement,
    options: &MonteCarloOptions,
) -> Result<MonteCarloResult> {
    cfg.validate()?;
    crate::analytic::check_placement(placement)?;
    check_options(options)?;
    let kk = cfg.num_tiers();
    let d = PER_TIER * kk;
    let window = options.window;
    let m = run(d, options, |rng, x| {
        let (winner, mut degenerate) = draw_association(cfg, &window, rng);
        for k in 0..kk {
            let snap = simulate_realization(cfg, k, placement, &window, rng);
            degenerate += snap.resampled;
            let row = &mut x[k * PER_TIER..(k + 1) * PER_TIER];
            row[0] = (winner == k) as u8 as f64;
            let (rate_m, rate_n) = snap.rates();
            let (slot_m, slot_n) = match snap.case {
                CaseLabel::CaseI => (1, 2),
                CaseLabel::CaseII => (4, 3),
            };
            row[slot_m] = rate_m;
            row[slot_n] = rate_n;
            row[5] = snap.leak_m();
            row[6] = snap.leak_n();
        }
        degenerate
    });
    Ok(summarise(cfg, &m, options.seed))
}

fn summarise(cfg: &NetworkConfig, m: &Moments, seed: u64) -> MonteCarloResult {
    let kk = cfg.num_tiers();
    let mean = m.mean();
    let est = |i: usize| Estimate {
        mean: mean[i],
        std_error: (m.covariance(i, i).max(0.0) / m.n as f64).sqrt(),
        n: m.n,
        seed,
    };
    let tiers_f64: Vec<TierRates<f64>> = (0..kk)
        .map(|k| {
            let b = k * PER_TIER;
            TierRates {
                association: mean[b],
                r_m_case1: mean[b + 1],
                r_n_case1: mean[b + 2],
                r_n_case2: mean[b + 3],
                r_m_case2: mean[b + 4],
                leak_m: mean[b + 5],
                leak_n: mean[b + 6],
            }
        })
        .collect();
    let tiers: Vec<TierRates<Estimate>> = (0..kk)
        .map(|k| {
            let b = k * PER_TIER;
            TierRates {
                association: est(b),
                r_m_case1: est(b + 1),
                r_n_case1: est(b + 2),
                r_n_case2: est(b + 3),
                r_m_case2: est(b + 4),
                leak_m: est(b + 5),
                leak_n: est(b + 6),
            }
        })
        .collect();

    // gradient of Σ_k A_k Σ_cases ([R_n − L_n]^+ + [R_m − L_m]^+)
    let mut grad = vec![0.0; PER_TIER * kk];
    for (k, t) in tiers_f64.iter().enumerate() {
        let b = k * PER_TIER;
        let a = t.association;
        grad[b] = t.tier_secrecy();
        for (slot, leak_slot, value, leak) in [
            (1, 5, t.r_m_case1, t.leak_m),
            (4, 5, t.r_m_case2, t.leak_m),
            (2, 6, t.r_n_case1, t.leak_n),
            (3, 6, t.r_n_case2, t.leak_n),
        ] {
            if value > leak {
                grad[b + slot] += a;
                grad[b + leak_slot] -= a;
            }
        }
    }
    let mut var = 0.0;
    for i in 0..grad.len() {
        if grad[i] == 0.0 {
            continue;
        }
        for j in 0..grad.len() {
            var += grad[i] * grad[j] * m.covariance(i, j);
        }
    }
    let secrecy_total = Estimate {
        mean: crate::model::combine_secrecy(&tiers_f64),
        std_error: (var.max(0.0) / m.n as f64).sqrt(),
        n: m.n,
        seed,
    };
    MonteCarloResult { rates: RateBreakdown { tiers, secrecy_total }, degenerate: m.degenerate }
}

/// Fraction of typical users associating with each tier, with binomial
/// standard errors.
pub fn empirical_association(cfg: &NetworkConfig, options: &MonteCarloOptions) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    check_options(options)?;
    let kk = cfg.num_tiers();
    let window = options.window;
    let mut counts = vec![0u64; kk];
    let n = options.iterations;
    let blocks = n.div_ceil(BLOCK);
    let partial: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut c = vec![0u64; kk];
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                let mut rng = iteration_rng(options.seed, i);
                c[draw_association(cfg, &window, &mut rng).0] += 1;
            }
            c
        })
        .collect();
    for c in &partial {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / n as f64;
            Estimate { mean: p, std_error: (p * (1.0 - p) / n as f64).sqrt(), n, seed: options.seed }
        })
        .collect())
}
