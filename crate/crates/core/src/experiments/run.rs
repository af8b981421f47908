use std::time::Instant;

use rayon::prelude::*;

use crate::analytic::{ergodic_secrecy_rate, AnalyticOptions, Engine};
use crate::error::Result;
use crate::model::{FirstUserPlacement, NetworkConfig, RateBreakdown};
use crate::montecarlo::{estimate_rates, MonteCarloOptions};
use crate::specialfn::QuadratureSettings;

use super::table::{round_sig, PointRates, ResultRow, ResultTable, TierRow};
use super::{EngineKind, RunSettings, SweepSpec};

fn analytic_point(b: RateBreakdown) -> PointRates {
    PointRates {
        secrecy_total: b.secrecy_total,
        secrecy_total_se: None,
        tiers: b.tiers.into_iter().map(|t| TierRow { secrecy: t.tier_secrecy(), rates: t, std_errors: None }).collect(),
        degenerate: None,
    }
}

/// Evaluates one configuration with one engine.
pub fn evaluate(
    cfg: &NetworkConfig,
    placement: FirstUserPlacement,
    engine: EngineKind,
    settings: &RunSettings,
) -> Result<PointRates> {
    let quadrature = QuadratureSettings::default().with_rel_tol(settings.rel_tol);
    let analytic =
        |engine| ergodic_secrecy_rate(cfg, placement, &AnalyticOptions { engine, quadrature }).map(analytic_point);
    let point = match engine {
        EngineKind::Analytic => analytic(Engine::Exact)?,
        EngineKind::LowerBound => analytic(Engine::LowerBound)?,
        EngineKind::InterferenceLimited => analytic(Engine::InterferenceLimited)?,
        EngineKind::MonteCarlo => {
            let options =
                MonteCarloOptions { iterations: settings.iterations, seed: settings.seed, window: settings.window };
            let r = estimate_rates(cfg, placement, &options)?;
            PointRates {
                secrecy_total: r.rates.secrecy_total.mean,
                secrecy_total_se: Some(r.rates.secrecy_total.std_error),
                tiers: r
                    .rates
                    .tiers
                    .iter()
                    .map(|t| {
                        let rates = t.map(|e| e.mean);
                        TierRow { secrecy: rates.tier_secrecy(), rates, std_errors: Some(t.map(|e| e.std_error)) }
                    })
                    .collect(),
                degenerate: Some(r.degenerate),
            }
        }
    };
    Ok(point.rounded())
}

/// `random` or the first-user radius, as written in the placement column.
pub fn placement_label(p: FirstUserPlacement) -> String {
    match p {
        FirstUserPlacement::Fixed(r) => super::table::format_sig(r),
        FirstUserPlacement::Random => "random".into(),
    }
}

/// Runs every (scenario, grid value, engine) point in parallel and returns
/// the rows in that nesting order. A failing point is recorded in its row.
pub fn run_sweep(spec: &SweepSpec) -> ResultTable {
    let mut jobs = Vec::new();
    for sc in &spec.scenarios {
        let values: Vec<Option<f64>> =
            if sc.swept { spec.values.iter().map(|&v| Some(round_sig(v))).collect() } else { vec![None] };
        for v in values {
            for &engine in &spec.engines {
                jobs.push((sc, v, engine));
            }
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(sc, value, engine)| {
            let start = Instant::now();
            let point = match value {
                Some(v) => sc.at(spec.parameter, v),
                None => Ok((sc.config.clone(), sc.placement)),
            };
            let placement = point.as_ref().map(|p| p.1).unwrap_or(sc.placement);
            let outcome =
                point.and_then(|(cfg, p)| evaluate(&cfg, p, engine, &spec.settings)).map_err(|e| e.to_string());
            ResultRow {
                scenario: sc.label.clone(),
                parameter: spec.parameter.to_string(),
                value,
                engine,
                placement: placement_label(placement),
                outcome,
                wall_time_s: spec.settings.timing.then(|| round_sig(start.elapsed().as_secs_f64())),
            }
        })
        .collect();
    ResultTable { rows }
}
