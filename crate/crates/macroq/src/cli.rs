//! Command-line front end. Exit codes: 0 success, 1 numeric or IO failure
//! (structured JSON on stderr), 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use macroq_core::lindblad::{evolve, EvolutionSpec};
use macroq_core::measure::{measure_wigner_grid, GridOptions, MeasureResult};
use macroq_core::phase_space::{suggest_half_width, wigner_of, Axis};
use serde_json::{json, Value};

use crate::check::{run_check, CheckConfig, DEFAULT_ENSEMBLE, DEFAULT_SEED};
use crate::gridfile::{load_wigner, save_wigner, GridFileError, LoadOptions};
use crate::routes::{NumericRoute, GRID_POINTS};
use crate::state::{RouteChoice, StateArgs};
use crate::sweep::{fmt12, to_csv, Family, Preset, SweepAxis, SweepSpec};

#[derive(Debug, Parser)]
#[command(
    name = "macroq",
    version,
    about = "Interference-based macroscopicity of bosonic states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one catalog state and print a JSON result.
    Measure {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value = "auto")]
        route: RouteChoice,
    },
    /// Sweep a state family and write CSV.
    Sweep(SweepArgs),
    /// Evaluate a WIGNER-GRID v1 file.
    ScoreWigner {
        path: PathBuf,
        /// Fail on normalization or boundary problems instead of renormalizing.
        #[arg(long)]
        strict: bool,
    },
    /// Write a catalog state's Wigner grid.
    EmitWigner {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = GRID_POINTS)]
        points: usize,
        /// Half-width of the square grid; defaults to a moment-based estimate.
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Integrate amplitude damping and write a trajectory CSV.
    Evolve {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        tau_max: f64,
        #[arg(long, default_value_t = EvolutionSpec::DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = 10)]
        record_every: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suite.
    Check {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ENSEMBLE)]
        ensemble: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, conflicts_with_all = ["family", "params"])]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, requires = "params")]
    pub family: Option<Family>,
    /// Comma-separated curve parameters.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub params: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub axis: Option<SweepAxis>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub log: bool,
    /// Force a numeric route instead of closed forms.
    #[arg(long, value_enum)]
    pub route: Option<NumericRoute>,
    #[arg(long, env = "MACROQ_DEFAULT_CUTOFF")]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(macroq_core::Error),
    Grid(GridFileError),
    Io(String),
    Failed(String),
}

impl From<macroq_core::Error> for CliError {
    fn from(e: macroq_core::Error) -> Self {
        match e {
            macroq_core::Error::InvalidParameter { .. } | macroq_core::Error::InvalidCutoffs(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

impl From<GridFileError> for CliError {
    fn from(e: GridFileError) -> Self {
        match e {
            GridFileError::Grid(inner) => inner.into(),
            other => CliError::Grid(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numeric(_) => "numeric",
            CliError::Grid(_) => "format",
            CliError::Io(_) => "io",
            CliError::Failed(_) => "check",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => m.clone(),
            CliError::Numeric(e) => e.to_string(),
            CliError::Grid(e) => e.to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.message(), "exit_code": self.exit_code() } })
    }
}

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn round12(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = fmt12(v).parse().expect("formatted float parses");
    json!(rounded)
}

pub fn result_json(r: &MeasureResult, extra_warnings: &[String]) -> Value {
    let mut warnings: Vec<String> = extra_warnings.to_vec();
    warnings.extend(r.warning_messages());
    json!({
        "value": round12(r.value),
        "route": r.route.as_str(),
        "mean_n": round12(r.mean_n),
        "purity": round12(r.purity),
        "err_estimate": round12(r.err_estimate),
        "warnings": warnings,
    })
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn sweep_spec(a: &SweepArgs) -> Result<SweepSpec, CliError> {
    let mut spec = match (a.preset, a.family) {
        (Some(p), _) => SweepSpec::preset(p),
        (None, Some(family)) => {
            let axis = a
                .axis
                .ok_or_else(|| CliError::Usage("--axis is required with --family".into()))?;
            let (start, stop) = match (a.start, a.stop) {
                (Some(s), Some(e)) => (s, e),
                _ => return Err(CliError::Usage("--start and --stop are required with --family".into())),
            };
            SweepSpec {
                family,
                params: a.params.clone().unwrap_or_default(),
                axis,
                start,
                stop,
                samples: a.samples.unwrap_or(101),
                log_spaced: a.log,
                route: None,
                cutoff: None,
            }
        }
        (None, None) => return Err(CliError::Usage("give --preset or --family".into())),
    };
    if a.preset.is_some() {
        if let Some(axis) = a.axis {
            spec.axis = axis;
        }
        if let Some(s) = a.start {
            spec.start = s;
        }
        if let Some(s) = a.stop {
            spec.stop = s;
        }
        if let Some(n) = a.samples {
            spec.samples = n;
        }
        spec.log_spaced |= a.log;
    }
    spec.route = a.route;
    spec.cutoff = a.cutoff;
    spec.validate()?;
    Ok(spec)
}

fn trajectory_csv(points: &[macroq_core::lindblad::TrajectoryPoint]) -> String {
    let mut out = String::from("tau,I,purity,mean_n\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            fmt12(p.tau),
            fmt12(p.measure),
            fmt12(p.purity),
            fmt12(p.mean_n)
        )
        .unwrap();
    }
    out
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Measure { state, route } => {
            let r = state.measure(route)?;
            write_output(None, &format!("{}\n", result_json(&r, &[])), stdout)
        }
        Command::Sweep(args) => {
            let spec = sweep_spec(&args)?;
            let rows = spec.run()?;
            write_output(args.out.as_deref(), &to_csv(&rows), stdout)
        }
        Command::ScoreWigner { path, strict } => {
            let opts = LoadOptions {
                strict,
                ..Default::default()
            };
            let (grid, load_warnings) = load_wigner(&path, &opts)?;
            let grid_opts = GridOptions {
                strict,
                ..Default::default()
            };
            let r = measure_wigner_grid(&grid, &grid_opts)?;
            // the route re-reports a normalization problem the loader already flagged
            let extra: Vec<String> = load_warnings
                .iter()
                .filter(|w| !r.warnings.contains(w))
                .map(|w| w.to_string())
                .collect();
            write_output(None, &format!("{}\n", result_json(&r, &extra)), stdout)
        }
        Command::EmitWigner {
            state,
            out,
            points,
            half_width,
        } => {
            let rho = state.dense()?;
            let hw = match half_width {
                Some(h) => h,
                None => suggest_half_width(&rho)?,
            };
            let axis = Axis::symmetric(hw, points)?;
            let mut grid = wigner_of(&rho, axis, axis)?;
            grid.meta
                .push(("state".into(), format!("{:?}", state.state).to_lowercase()));
            save_wigner(&out, &grid)?;
            Ok(())
        }
        Command::Evolve {
            state,
            tau_max,
            step,
            record_every,
            out,
        } => {
            let rho = state.dense()?;
            let traj = evolve(&rho, &EvolutionSpec::new(tau_max, step, record_every)?)?;
            write_output(out.as_deref(), &trajectory_csv(&traj), stdout)
        }
        Command::Check {
            seed,
            ensemble,
            inject_fault,
        } => {
            let report = run_check(&CheckConfig {
                seed,
                ensemble,
                inject_fault,
                ..Default::default()
            })?;
            write_output(None, &report.render(), stdout)?;
            if report.all_passed() {
                Ok(())
            } else {
                let failed: Vec<&str> = report.properties.iter().filter(|p| !p.passed).map(|p| p.name).collect();
                Err(CliError::Failed(format!("failed properties: {}", failed.join(", "))))
            }
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}
