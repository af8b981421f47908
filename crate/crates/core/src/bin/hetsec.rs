use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hetnet_secrecy::experiments::{
    evaluate, figure_preset, placement_label, point_from_toml_str, preset_source, round_sig, run_sweep, EngineKind,
    ResultRow, ResultTable, RunSettings, SweepSpec, PRESETS,
};

/// Ergodic secrecy rate of NOMA heterogeneous networks: sweeps, presets and
/// single-point evaluation.
#[derive(Parser)]
#[command(name = "hetsec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Overrides {
    /// Master seed of the simulation engine.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo iterations per point.
    #[arg(long, global = true)]
    iters: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

impl Overrides {
    fn apply(&self, s: &mut RunSettings) {
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(n) = self.iters {
            s.iterations = n;
        }
        if let Some(t) = self.tol {
            s.rel_tol = t;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML spec file.
    Sweep {
        spec: PathBuf,
        /// CSV destination; defaults to the sweep file's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in figure preset.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset's TOML instead of running it.
        #[arg(long)]
        print_spec: bool,
    },
    /// Check a spec file and report every problem.
    Validate { spec: PathBuf },
    /// Evaluate a single configuration file.
    Point {
        config: PathBuf,
        #[arg(long, value_enum, num_args = 1.., default_values_t = [EngineArg::Analytic])]
        engine: Vec<EngineArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum EngineArg {
    Analytic,
    LowerBound,
    Montecarlo,
    InterferenceLimited,
}

impl From<EngineArg> for EngineKind {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Analytic => EngineKind::Analytic,
            EngineArg::LowerBound => EngineKind::LowerBound,
            EngineArg::Montecarlo => EngineKind::MonteCarlo,
            EngineArg::InterferenceLimited => EngineKind::InterferenceLimited,
        }
    }
}

fn write_table(table: &ResultTable, out: Option<&Path>) -> hetnet_secrecy::Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn finish(table: &ResultTable) -> ExitCode {
    let failed = table.failures();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{failed} of {} points failed; see the error column", table.rows.len());
        ExitCode::FAILURE
    }
}

fn run_spec(mut spec: SweepSpec, out: Option<PathBuf>, overrides: &Overrides) -> hetnet_secrecy::Result<ExitCode> {
    overrides.apply(&mut spec.settings);
    spec.validate()?;
    let table = run_sweep(&spec);
    write_table(&table, out.or(spec.output.clone()).as_deref())?;
    Ok(finish(&table))
}

fn run(cli: Cli) -> hetnet_secrecy::Result<ExitCode> {
    match cli.command {
        Command::Sweep { spec, out } => run_spec(SweepSpec::from_path(&spec)?, out, &cli.overrides),
        Command::Preset { name, out, print_spec } => {
            if print_spec {
                print!("{}", preset_source(&name)?);
                return Ok(ExitCode::SUCCESS);
            }
            run_spec(figure_preset(&name)?, out, &cli.overrides)
        }
        Command::Validate { spec } => {
            let s = SweepSpec::from_path(&spec)?;
            let points = s.scenarios.iter().map(|c| if c.swept { s.values.len() } else { 1 }).sum::<usize>();
            println!("ok: {} scenarios, {points} points, {} engines", s.scenarios.len(), s.engines.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Point { config, engine } => {
            let sc = point_from_toml_str(&std::fs::read_to_string(&config)?)?;
            let mut settings = RunSettings::default();
            cli.overrides.apply(&mut settings);
            let rows = engine
                .into_iter()
                .map(|e| {
                    let engine = EngineKind::from(e);
                    let start = std::time::Instant::now();
                    let outcome = evaluate(&sc.config, sc.placement, engine, &settings).map_err(|e| e.to_string());
                    ResultRow {
                        scenario: sc.label.clone(),
                        parameter: String::new(),
                        value: None,
                        engine,
                        placement: placement_label(sc.placement),
                        outcome,
                        wall_time_s: Some(round_sig(start.elapsed().as_secs_f64())),
                    }
                })
                .collect();
            let table = ResultTable { rows };
            write_table(&table, None)?;
            Ok(finish(&table))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
