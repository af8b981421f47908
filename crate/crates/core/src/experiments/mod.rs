//! Config-driven parameter sweeps over the analytic and simulation engines,
//! with built-in presets for the standard figure scenarios.

mod run;
mod sweep;
mod table;

pub use run::{evaluate, placement_label, run_sweep};
pub use sweep::{point_from_toml_str, EngineKind, ParamPath, RunSettings, Scenario, SweepSpec, TierField, LAMBDA0};
pub use table::{format_sig, round_sig, without_timing, PointRates, ResultRow, ResultTable, TierRow, TIMING_COLUMN};

use crate::error::{Error, Result};

/// Names accepted by [`figure_preset`].
pub const PRESETS: [&str; 7] = ["fig3", "fig4", "fig5", "fig6", "fig7a", "fig7b", "fig7c"];

/// TOML source of a preset.
pub fn preset_source(name: &str) -> Result<&'static str> {
    Ok(match name {
        "fig3" => include_str!("presets/fig3.toml"),
        "fig4" => include_str!("presets/fig4.toml"),
        "fig5" => include_str!("presets/fig5.toml"),
        "fig6" => include_str!("presets/fig6.toml"),
        "fig7a" => include_str!("presets/fig7a.toml"),
        "fig7b" => include_str!("presets/fig7b.toml"),
        "fig7c" => include_str!("presets/fig7c.toml"),
        _ => return Err(Error::UnknownPreset(name.into())),
    })
}

pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    SweepSpec::from_toml_str(preset_source(name)?)
}
