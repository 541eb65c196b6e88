use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flr4_core::grid::GridSpec;
use flr4_core::sweeps::{DEFAULT_DELTA1_GRID, DEFAULT_OMEGA3_GRID};
use flr4_core::{Method, SystemParams, Transition};

mod job;
mod output;

use job::{Figure, Format, Job, LineSelection, Manifest, Target};

/// Error reported as a single `error: <code>: <message>` line.
#[derive(Debug)]
pub struct CliError {
    code: String,
    message: String,
    exit: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: "Usage".into(),
            message: message.into(),
            exit: 2,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: "IoError".into(),
            message: format!("{}: {e}", path.display()),
            exit: 1,
        }
    }

    fn config(path: &Path, message: impl std::fmt::Display) -> Self {
        Self {
            code: "ConfigError".into(),
            message: format!("{}: {message}", path.display()),
            exit: 1,
        }
    }
}

impl From<flr4_core::Error> for CliError {
    fn from(e: flr4_core::Error) -> Self {
        Self {
            code: e.code().into(),
            message: e.to_string(),
            exit: 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "flr4", version, about = "Steady states and fluorescence spectra of a driven four-level ladder atom")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Eq10,
    Qrt,
    Timedomain,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Eq10 => Method::Eq10,
            MethodArg::Qrt => Method::QrtConsistent,
            MethodArg::Timedomain => Method::TimeDomain,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransitionArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

impl From<TransitionArg> for LineSelection {
    fn from(t: TransitionArg) -> Self {
        match t {
            TransitionArg::One => LineSelection::One(Transition::L21),
            TransitionArg::Two => LineSelection::One(Transition::L32),
            TransitionArg::Three => LineSelection::One(Transition::L43),
            TransitionArg::All => LineSelection::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
}

impl From<FigureArg> for Figure {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig2a => Figure::Fig2a,
            FigureArg::Fig2b => Figure::Fig2b,
            FigureArg::Fig3a => Figure::Fig3a,
            FigureArg::Fig3b => Figure::Fig3b,
            FigureArg::Fig4 => Figure::Fig4,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a parameter file and print the constraints evaluated.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Steady-state vector with labelled components and the ground population.
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Eigenvalues of the generator, descending real part.
    Eigs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Incoherent spectra on a uniform frequency grid.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        nu_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        nu_max: f64,
        #[arg(long)]
        nu_points: usize,
        #[arg(long, value_enum, default_value = "eq10")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "all")]
        transition: TransitionArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Steady-state populations against the first detuning.
    Populations {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_DELTA1_GRID.min)]
        delta1_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_DELTA1_GRID.max)]
        delta1_max: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA1_GRID.points)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Peak emission of each line against the third Rabi frequency.
    SweepOmega3 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_OMEGA3_GRID.min)]
        min: f64,
        #[arg(long, default_value_t = DEFAULT_OMEGA3_GRID.max)]
        max: f64,
        #[arg(long, default_value_t = DEFAULT_OMEGA3_GRID.points)]
        points: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
        #[arg(long, value_enum, default_value = "eq10")]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Canonical figure datasets.
    Figure {
        #[arg(value_enum)]
        name: FigureArg,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Regenerate the outputs recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, conflicts_with = "out_dir")]
        out: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn load_params(path: &Path) -> Result<SystemParams, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(path, e))
}

fn single_file(out: Option<PathBuf>) -> Target {
    out.map_or(Target::Stdout, Target::File)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FLR4_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("FLR4_THREADS must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (job, params, target) = match cli.command {
        Command::Validate { config } => {
            let params = load_params(&config)?;
            let v = params.validate()?;
            for c in v.checks() {
                let status = if c.passed { "ok" } else { "override" };
                println!("{status} {} = {}", c.name, c.value);
            }
            println!("valid");
            return Ok(());
        }
        Command::Steady { config, out, format } => {
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            (Job::Steady { format }, load_params(&config)?, single_file(out))
        }
        Command::Eigs { config, out } => (Job::Eigs, load_params(&config)?, single_file(out)),
        Command::Spectrum {
            config,
            nu_min,
            nu_max,
            nu_points,
            method,
            transition,
            out,
        } => (
            Job::Spectrum {
                nu: GridSpec::linear(nu_min, nu_max, nu_points),
                method: method.into(),
                lines: transition.into(),
            },
            load_params(&config)?,
            Target::File(out),
        ),
        Command::Populations {
            config,
            delta1_min,
            delta1_max,
            points,
            out,
        } => (
            Job::Populations {
                delta1: GridSpec::linear(delta1_min, delta1_max, points),
            },
            load_params(&config)?,
            Target::File(out),
        ),
        Command::SweepOmega3 {
            config,
            min,
            max,
            points,
            log,
            method,
            out,
        } => (
            Job::SweepOmega3 {
                omega3: GridSpec { min, max, points, log },
                method: method.into(),
            },
            load_params(&config)?,
            Target::File(out),
        ),
        Command::Figure { name, out_dir } => {
            let figure: Figure = name.into();
            (Job::Figure { figure }, figure.params(), Target::Dir(out_dir))
        }
        Command::Replay { manifest, out, out_dir } => {
            let text = std::fs::read_to_string(&manifest).map_err(|e| CliError::io(&manifest, e))?;
            let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::config(&manifest, e))?;
            let target = match (out, out_dir) {
                (Some(f), _) => Target::File(f),
                (None, Some(d)) => Target::Dir(d),
                (None, None) => Target::Stdout,
            };
            (m.job, m.params, target)
        }
    };
    job::run(&job, &params, &target)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.message.replace('\n', " ");
            eprintln!("error: {}: {}", e.code, message);
            ExitCode::from(e.exit)
        }
    }
}
