use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{dbm_to_linear, FirstUserPlacement, NetworkConfig, NomaPowerSplit, TierParams};
use crate::montecarlo::SimWindow;

/// Reference density `1/(π·500²)` per m², one base station per disc of
/// radius 500 m.
pub const LAMBDA0: f64 = 1.0 / (std::f64::consts::PI * 250_000.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Analytic,
    LowerBound,
    #[serde(rename = "montecarlo")]
    MonteCarlo,
    InterferenceLimited,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [Self::Analytic, Self::LowerBound, Self::MonteCarlo, Self::InterferenceLimited];

    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::LowerBound => "lower_bound",
            Self::MonteCarlo => "montecarlo",
            Self::InterferenceLimited => "interference_limited",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::Spec(format!("unknown engine `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierField {
    Density,
    /// Density in multiples of [`LAMBDA0`].
    DensityLambda0,
    Bias,
    PowerDbm,
    Alpha,
}

/// A sweepable scalar of a scenario. Tier indices are 1-based, matching the
/// CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    EveDensity,
    NoiseDbm,
    FirstUserRadius,
    /// Near-user power fraction; the far user gets the rest.
    SplitNear,
    Tier {
        tier: usize,
        field: TierField,
    },
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Spec(format!("unknown parameter path `{s}`"));
        Ok(match s {
            "eve_density" => Self::EveDensity,
            "noise_dbm" => Self::NoiseDbm,
            "first_user_radius" => Self::FirstUserRadius,
            "split.a_n" => Self::SplitNear,
            _ => {
                let rest = s.strip_prefix("tier[").ok_or_else(bad)?;
                let (index, field) = rest.split_once("].").ok_or_else(bad)?;
                let tier: usize = index.parse().map_err(|_| bad())?;
                if tier == 0 {
                    return Err(bad());
                }
                let field = match field {
                    "density" => TierField::Density,
                    "density_lambda0" => TierField::DensityLambda0,
                    "bias" => TierField::Bias,
                    "power_dbm" => TierField::PowerDbm,
                    "alpha" => TierField::Alpha,
                    _ => return Err(bad()),
                };
                Self::Tier { tier, field }
            }
        })
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EveDensity => f.write_str("eve_density"),
            Self::NoiseDbm => f.write_str("noise_dbm"),
            Self::FirstUserRadius => f.write_str("first_user_radius"),
            Self::SplitNear => f.write_str("split.a_n"),
            Self::Tier { tier, field } => {
                let name = match field {
                    TierField::Density => "density",
                    TierField::DensityLambda0 => "density_lambda0",
                    TierField::Bias => "bias",
                    TierField::PowerDbm => "power_dbm",
                    TierField::Alpha => "alpha",
                };
                write!(f, "tier[{tier}].{name}")
            }
        }
    }
}

/// One curve of a sweep: a base configuration and where its first user sits.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub config: NetworkConfig,
    pub placement: FirstUserPlacement,
    /// When false the scenario is evaluated once at its base values, e.g. a
    /// random-placement reference next to a sweep over the first-user radius.
    pub swept: bool,
}

impl Scenario {
    /// The configuration and placement at one grid value.
    pub fn at(&self, path: ParamPath, value: f64) -> Result<(NetworkConfig, FirstUserPlacement)> {
        let mut cfg = self.config.clone();
        let mut placement = self.placement;
        match path {
            ParamPath::EveDensity => cfg.eve_density = value,
            ParamPath::NoiseDbm => cfg.noise = dbm_to_linear(value),
            ParamPath::FirstUserRadius => match placement {
                FirstUserPlacement::Fixed(_) => placement = FirstUserPlacement::Fixed(value),
                FirstUserPlacement::Random => {
                    return Err(Error::Spec(format!(
                        "scenario `{}` places its first user at random; mark it `swept = false`",
                        self.label
                    )))
                }
            },
            ParamPath::SplitNear => cfg.split = NomaPowerSplit::new(1.0 - value, value),
            ParamPath::Tier { tier, field } => {
                let n = cfg.num_tiers();
                let t = cfg
                    .tiers
                    .get_mut(tier - 1)
                    .ok_or_else(|| Error::Spec(format!("scenario `{}` has {n} tiers, no tier {tier}", self.label)))?;
                match field {
                    TierField::Density => t.density = value,
                    TierField::DensityLambda0 => t.density = value * LAMBDA0,
                    TierField::Bias => t.bias = value,
                    TierField::PowerDbm => t.power = dbm_to_linear(value),
                    TierField::Alpha => t.alpha = value,
                }
            }
        }
        Ok((cfg, placement))
    }
}

/// Numerical settings shared by every point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub seed: u64,
    pub iterations: u64,
    pub window: SimWindow,
    pub rel_tol: f64,
    /// Record per-point wall time. The column is excluded from determinism.
    pub timing: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { seed: 1, iterations: 100_000, window: SimWindow::default(), rel_tol: 1e-6, timing: true }
    }
}

/// A validated parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub parameter: ParamPath,
    pub values: Vec<f64>,
    pub engines: Vec<EngineKind>,
    pub scenarios: Vec<Scenario>,
    pub settings: RunSettings,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    sweep: RawSweep,
    #[serde(rename = "scenario", default)]
    scenarios: Vec<RawScenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    stop: f64,
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    name: Option<String>,
    parameter: String,
    values: Option<Vec<f64>>,
    log_grid: Option<RawGrid>,
    linear_grid: Option<RawGrid>,
    engines: Vec<EngineKind>,
    seed: Option<u64>,
    iterations: Option<u64>,
    window_radius: Option<f64>,
    rel_tol: Option<f64>,
    timing: Option<bool>,
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawPlacement {
    Radius(f64),
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTier {
    power_dbm: Option<f64>,
    power_mw: Option<f64>,
    density: Option<f64>,
    density_lambda0: Option<f64>,
    alpha: f64,
    bias: Option<f64>,
}

/// A single scenario; also the top-level layout of a point file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    label: Option<String>,
    #[serde(rename = "tier")]
    tiers: Vec<RawTier>,
    noise_dbm: Option<f64>,
    noise_mw: Option<f64>,
    split: Option<[f64; 2]>,
    eve_density: f64,
    placement: RawPlacement,
    oma: Option<bool>,
    tier_noma: Option<Vec<bool>>,
    swept: Option<bool>,
}

fn one_of(a: Option<f64>, b: Option<f64>, what: &str, errs: &mut Vec<String>) -> Option<(f64, bool)> {
    match (a, b) {
        (Some(x), None) => Some((x, true)),
        (None, Some(x)) => Some((x, false)),
        _ => {
            errs.push(format!("{what}: give exactly one of the two forms"));
            None
        }
    }
}

fn resolve_scenario(raw: RawScenario, index: usize, errs: &mut Vec<String>) -> Option<Scenario> {
    let label = raw.label.unwrap_or_else(|| format!("scenario{}", index + 1));
    let before = errs.len();
    let mut tiers = Vec::new();
    for (j, t) in raw.tiers.iter().enumerate() {
        let ctx = format!("{label}: tier {}", j + 1);
        let power = one_of(t.power_dbm, t.power_mw, &format!("{ctx} power_dbm/power_mw"), errs).map(|(x, dbm)| {
            if dbm {
                dbm_to_linear(x)
            } else {
                x
            }
        });
        let density = one_of(t.density_lambda0, t.density, &format!("{ctx} density_lambda0/density"), errs)
            .map(|(x, rel)| if rel { x * LAMBDA0 } else { x });
        if let (Some(p), Some(d)) = (power, density) {
            tiers.push(TierParams::new(p, d, t.alpha, t.bias.unwrap_or(1.0)));
        }
    }
    let noise = match (raw.noise_dbm, raw.noise_mw) {
        (None, None) => dbm_to_linear(-90.0),
        (a, b) => one_of(a, b, &format!("{label}: noise_dbm/noise_mw"), errs)
            .map(|(x, dbm)| if dbm { dbm_to_linear(x) } else { x })
            .unwrap_or(0.0),
    };
    let [a_m, a_n] = raw.split.unwrap_or([0.6, 0.4]);
    let placement = match raw.placement {
        RawPlacement::Radius(r) => FirstUserPlacement::Fixed(r),
        RawPlacement::Keyword(k) if k == "random" => FirstUserPlacement::Random,
        RawPlacement::Keyword(k) => {
            errs.push(format!("{label}: placement must be a radius or \"random\", got `{k}`"));
            FirstUserPlacement::Random
        }
    };
    let mut config = NetworkConfig::new(tiers, noise, NomaPowerSplit::new(a_m, a_n), raw.eve_density);
    config.oma_mode = raw.oma.unwrap_or(false);
    if let Some(flags) = raw.tier_noma {
        config.tier_noma = flags;
    }
    if config.oma_mode || config.tier_noma.iter().all(|&on| !on) {
        // single-user tiers ignore the split; accept the canonical one
        if raw.split.is_none() {
            config.split = NomaPowerSplit::OMA;
        }
    }
    (errs.len() == before).then_some(Scenario { label, config, placement, swept: raw.swept.unwrap_or(true) })
}

fn grid(g: &RawGrid, log: bool, errs: &mut Vec<String>) -> Vec<f64> {
    if g.points < 2 || (log && (g.start <= 0.0 || g.stop <= 0.0)) {
        errs.push("grid needs at least two points and, for log_grid, positive bounds".into());
        return Vec::new();
    }
    let n = (g.points - 1) as f64;
    (0..g.points)
        .map(|i| {
            let f = i as f64 / n;
            if i == g.points - 1 {
                g.stop
            } else if log {
                g.start * (g.stop / g.start).powf(f)
            } else {
                g.start + (g.stop - g.start) * f
            }
        })
        .collect()
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text)?;
        let mut errs = Vec::new();
        let s = raw.sweep;
        let parameter = s.parameter.parse::<ParamPath>().map_err(|e| errs.push(e.to_string())).ok();
        let values = match (s.values, s.log_grid, s.linear_grid) {
            (Some(v), None, None) => v,
            (None, Some(g), None) => grid(&g, true, &mut errs),
            (None, None, Some(g)) => grid(&g, false, &mut errs),
            _ => {
                errs.push("give exactly one of values, log_grid, linear_grid".into());
                Vec::new()
            }
        };
        let scenarios: Vec<Scenario> =
            raw.scenarios.into_iter().enumerate().filter_map(|(i, r)| resolve_scenario(r, i, &mut errs)).collect();
        let defaults = RunSettings::default();
        let settings = RunSettings {
            seed: s.seed.unwrap_or(defaults.seed),
            iterations: s.iterations.unwrap_or(defaults.iterations),
            window: SimWindow { radius: s.window_radius.unwrap_or(defaults.window.radius) },
            rel_tol: s.rel_tol.unwrap_or(defaults.rel_tol),
            timing: s.timing.unwrap_or(defaults.timing),
        };
        if !errs.is_empty() {
            return Err(Error::Spec(errs.join("; ")));
        }
        let spec = SweepSpec {
            name: s.name.unwrap_or_else(|| "sweep".into()),
            parameter: parameter.expect("parse errors were reported"),
            values,
            engines: s.engines,
            scenarios,
            settings,
            output: s.output,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Every problem with the sweep, including invalid configurations at any
    /// grid value.
    pub fn issues(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.values.is_empty() {
            errs.push("the grid is empty".into());
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            errs.push("grid values must be finite".into());
        }
        if self.values.windows(2).any(|w| w[1] < w[0]) {
            errs.push("grid values must be sorted ascending".into());
        }
        if self.engines.is_empty() {
            errs.push("at least one engine is required".into());
        }
        if self.scenarios.is_empty() {
            errs.push("at least one [[scenario]] is required".into());
        }
        let s = &self.settings;
        if s.iterations == 0 {
            errs.push("iterations must be at least 1".into());
        }
        if !(s.window.radius > 0.0 && s.window.radius.is_finite()) {
            errs.push("window_radius must be positive".into());
        }
        if !(s.rel_tol > 0.0 && s.rel_tol < 1.0) {
            errs.push("rel_tol must lie in (0, 1)".into());
        }
        for sc in &self.scenarios {
            if let Err(e) = sc.config.validate() {
                errs.push(format!("{}: {e}", sc.label));
                continue;
            }
            if !sc.swept {
                continue;
            }
            for &v in &self.values {
                match sc.at(self.parameter, v).and_then(|(c, p)| {
                    c.validate()?;
                    crate::analytic::check_placement(p)
                }) {
                    Ok(()) => {}
                    Err(e) => {
                        errs.push(format!("{} at {} = {v}: {e}", sc.label, self.parameter));
                        break;
                    }
                }
            }
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.issues();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Spec(errs.join("; ")))
        }
    }
}

/// A single configuration read from a point file: the keys of one
/// `[[scenario]]` table at top level.
pub fn point_from_toml_str(text: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(text)?;
    let mut errs = Vec::new();
    let sc = resolve_scenario(raw, 0, &mut errs);
    match sc {
        Some(sc) if errs.is_empty() => {
            sc.config.validate()?;
            crate::analytic::check_placement(sc.placement)?;
            Ok(sc)
        }
        _ => Err(Error::Spec(errs.join("; "))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[sweep]
parameter = "tier[2].bias"
values = [1.0, 2.0]
engines = ["analytic", "montecarlo"]

[[scenario]]
label = "two tiers"
eve_density = 1e-7
placement = 50.0
[[scenario.tier]]
power_dbm = 40.0
density_lambda0 = 1.0
alpha = 3.5
[[scenario.tier]]
power_dbm = 30.0
density_lambda0 = 10.0
alpha = 4.0
"#;

    #[test]
    fn parses_a_minimal_spec() {
        let s = SweepSpec::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.parameter, ParamPath::Tier { tier: 2, field: TierField::Bias });
        assert_eq!(s.engines, vec![EngineKind::Analytic, EngineKind::MonteCarlo]);
        let sc = &s.scenarios[0];
        assert_eq!(sc.placement, FirstUserPlacement::Fixed(50.0));
        assert!((sc.config.tiers[1].density - 10.0 * LAMBDA0).abs() < 1e-20);
        assert!((sc.config.noise - 1e-9).abs() < 1e-22);
        let (c, _) = sc.at(s.parameter, 5.0).unwrap();
        assert_eq!(c.tiers[1].bias, 5.0);
        assert_eq!(s.settings, RunSettings::default());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let text = MINIMAL.replace("values = [1.0, 2.0]", "values = []");
        let err = SweepSpec::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("grid is empty"), "{err}");
    }

    #[test]
    fn unsorted_grid_and_bad_tier_are_reported_together() {
        let text =
            MINIMAL.replace("values = [1.0, 2.0]", "values = [2.0, 1.0]").replace("tier[2].bias", "tier[3].bias");
        let err = SweepSpec::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("sorted") && err.contains("no tier 3"), "{err}");
    }

    #[test]
    fn unknown_keys_and_engines_fail() {
        assert!(SweepSpec::from_toml_str(&MINIMAL.replace("alpha = 4.0", "alpha = 4.0\ncolour = 1")).is_err());
        assert!(SweepSpec::from_toml_str(&MINIMAL.replace("\"montecarlo\"", "\"magic\"")).is_err());
    }

    #[test]
    fn log_grid_endpoints_are_exact() {
        let text = MINIMAL.replace("values = [1.0, 2.0]", "log_grid = { start = 1e-8, stop = 1e-4, points = 9 }");
        let text = text.replace("tier[2].bias", "eve_density");
        let s = SweepSpec::from_toml_str(&text).unwrap();
        assert_eq!(s.values.len(), 9);
        assert_eq!((s.values[0], s.values[8]), (1e-8, 1e-4));
        assert!((s.values[4] / 1e-6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn param_paths_round_trip() {
        for p in ["eve_density", "noise_dbm", "first_user_radius", "split.a_n", "tier[1].density", "tier[3].power_dbm"]
        {
            assert_eq!(p.parse::<ParamPath>().unwrap().to_string(), p);
        }
        assert!("tier[0].bias".parse::<ParamPath>().is_err());
        assert!("tier[1].colour".parse::<ParamPath>().is_err());
    }

    #[test]
    fn random_placement_cannot_sweep_the_radius() {
        let text =
            MINIMAL.replace("tier[2].bias", "first_user_radius").replace("placement = 50.0", "placement = \"random\"");
        assert!(SweepSpec::from_toml_str(&text).is_err());
        let held = text.replace("placement = \"random\"", "placement = \"random\"\nswept = false");
        assert!(SweepSpec::from_toml_str(&held).is_ok());
    }

    #[test]
    fn point_files() {
        let text = r#"
eve_density = 1e-7
placement = "random"
oma = true
[[tier]]
power_mw = 10000.0
density = 1.2732e-6
alpha = 4.0
"#;
        let sc = point_from_toml_str(text).unwrap();
        assert!(sc.config.oma_mode);
        assert_eq!(sc.config.split, NomaPowerSplit::OMA);
        assert_eq!(sc.config.tiers[0].power, 1e4);
    }
}
