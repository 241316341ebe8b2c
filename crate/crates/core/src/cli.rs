//! Command-line front end: `run` for a single simulation, `experiment` for a
//! replicated grid.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::controller::ControllerKind;
use crate::experiments::{run_grid, GridConfig};
use crate::sim::{run_csv_row, run_detailed, run_traced, ControllerSpec, SimConfig};

/// Environment variable consulted when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "CROSSFLOW_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "crossflow-report";
const INCOMPLETE_MARKER: &str = "INCOMPLETE";

#[derive(Debug, Parser)]
#[command(name = "crossflow", version, about = "Signalized intersection simulator and controller benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one run and print its metrics as a CSV row.
    Run(RunArgs),
    /// Run a controller x demand-level grid and write the report files.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// bm1, bm2 or dt3p
    #[arg(long)]
    pub controller: String,
    /// Arrival rate, vehicles per hour per lane.
    #[arg(long, allow_negative_numbers = true)]
    pub demand: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Simulated seconds.
    #[arg(long, default_value_t = 3600)]
    pub duration: u32,
    /// Write the per-step detection trace CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Grid config JSON supplying controller and discharge parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the CSV header before the row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads for replications.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Report directory; falls back to $CROSSFLOW_OUTPUT_DIR, then the
    /// config's output_dir.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failed command: exit code plus a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

fn load_grid_config(path: &Path) -> Result<GridConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Builds the single-run configuration from flags and an optional grid config.
pub fn run_config(args: &RunArgs) -> Result<SimConfig, CliError> {
    let kind: ControllerKind = args.controller.parse().map_err(CliError::usage)?;
    if !(args.demand >= 0.0 && args.demand.is_finite()) {
        return Err(CliError::usage(format!("demand must be >= 0, got {}", args.demand)));
    }
    if args.duration == 0 {
        return Err(CliError::usage("duration must be > 0"));
    }
    let mut cfg = SimConfig::new(kind, args.demand, args.seed);
    cfg.duration_s = args.duration;
    if let Some(path) = &args.config {
        let grid = load_grid_config(path)?;
        cfg.full_cycle_s = grid.full_cycle_s;
        cfg.saturation_headway_s = grid.saturation_headway_s;
        cfg.startup_lost_time_s = grid.startup_lost_time_s;
        if let Some(spec) = grid.controllers.iter().find(|s| s.kind() == kind) {
            cfg.controller = spec.clone();
        } else {
            cfg.controller = ControllerSpec::default_for(kind);
        }
    }
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(cfg)
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = run_config(args)?;
    let outcome = match &args.trace {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            run_traced(&cfg, BufWriter::new(file))
        }
        None => run_detailed(&cfg),
    }
    .map_err(|e| CliError::config(e.to_string()))?;
    let label = cfg.controller.kind().label();
    let io = |e: std::io::Error| CliError::config(e.to_string());
    if args.header {
        writeln!(stdout, "{}", crate::sim::run_csv_header()).map_err(io)?;
    }
    writeln!(stdout, "{}", run_csv_row(label, cfg.demand_veh_per_hour_per_lane, cfg.seed, &outcome.metrics))
        .map_err(io)?;
    Ok(())
}

fn output_dir(args: &ExperimentArgs, grid: &GridConfig) -> PathBuf {
    args.output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| grid.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

pub fn cmd_experiment(args: &ExperimentArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.jobs == 0 {
        return Err(CliError::usage("--jobs must be >= 1"));
    }
    let grid = load_grid_config(&args.config)?;
    grid.validate().map_err(|e| CliError::config(e.to_string()))?;
    let dir = output_dir(args, &grid);
    fs::create_dir_all(&dir).map_err(|e| CliError::config(format!("{}: {e}", dir.display())))?;
    let marker = dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, "report generation did not finish; files here may be partial\n")
        .map_err(|e| CliError::config(e.to_string()))?;

    let report = run_grid(&grid, args.jobs).map_err(|e| CliError::config(e.to_string()))?;
    let written = report.write_to(&dir).map_err(|e| CliError::config(e.to_string()))?;
    fs::remove_file(&marker).map_err(|e| CliError::config(e.to_string()))?;

    let io = |e: std::io::Error| CliError::config(e.to_string());
    write!(stdout, "{}", report.summary()).map_err(io)?;
    writeln!(stdout, "wrote {} files to {}", written.len(), dir.display()).map_err(io)?;
    Ok(())
}

/// Parses `args` and runs the selected command; returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args, stdout),
        Command::Experiment(args) => cmd_experiment(args, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
