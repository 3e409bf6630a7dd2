//! `hardyerg`: classification, averaging, recurrence, seminorm, PET,
//! Taylor-window and equidistribution experiments from the command line.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage,
//! parse or configuration error. A failed verdict is a result, not an
//! error, and still exits 0.

mod commands;
mod config;
mod describe;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use report::Report;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError { code: 1, msg: msg.into() }
    }
}

impl From<hardyerg::Error> for CliError {
    fn from(e: hardyerg::Error) -> Self {
        use hardyerg::Error::*;
        match e {
            Syntax { .. } | UnsupportedForm(_) | Config(_) => CliError::usage(e.to_string()),
            _ => CliError::runtime(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hardyerg", version, about = "Experiments with Hardy sequences and multiple ergodic averages")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Largest N averaged over
    #[arg(long = "N", global = true, value_name = "N")]
    n: Option<u64>,
    /// Number of initial points
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed for random corpora
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run on a single thread
    #[arg(long, global = true)]
    serial: bool,
    /// Directory for <experiment>.json and <experiment>.csv
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Named experiment (flags and --config override its settings)
    #[arg(long, global = true)]
    preset: Option<String>,
    /// TOML file with run settings
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Comma-separated checkpoints
    #[arg(long, global = true, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Tolerance used by the verdicts
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence and recurrence class of each expression
    Classify { exprs: Vec<String> },
    /// Multiple ergodic averages along Hardy sequences
    Avg {
        #[arg(long)]
        system: Option<String>,
        /// Observable, one per factor
        #[arg(long = "obs")]
        observables: Vec<String>,
        /// Sequence expression, one per factor
        #[arg(long = "seq")]
        sequences: Vec<String>,
        /// Compare multiples of [a(n)] with the Furstenberg averages
        #[arg(long, value_name = "EXPR")]
        compare: Option<String>,
        /// Oscillation of the running average at the origin
        #[arg(long)]
        oscillation: bool,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        from: Option<u64>,
    },
    /// Averages of intersection measures along Hardy sequences
    Recur {
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long = "seq")]
        sequences: Vec<String>,
        #[arg(long)]
        from: Option<u64>,
    },
    /// Uniformity seminorms on explicit systems
    Seminorm {
        #[arg(long)]
        system: Option<String>,
        #[arg(long = "obs")]
        observables: Vec<String>,
        #[arg(long)]
        ell: Option<u32>,
        /// Random sweep over these moduli
        #[arg(long, value_delimiter = ',')]
        moduli: Option<Vec<u64>>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Type vector of a family
    PetType {
        family: Option<String>,
        /// Use the Hardy type
        #[arg(long)]
        hardy: bool,
        /// Also show the type after a van der Corput step at this member
        #[arg(long)]
        pivot: Option<usize>,
    },
    /// PET derivation of a family, or of a random corpus
    PetTree {
        family: Option<String>,
        #[arg(long)]
        hardy: bool,
        /// Corpus size when no family is given
        #[arg(long)]
        count: Option<usize>,
    },
    /// Taylor-window reduction of Hardy sequences
    Taylor {
        exprs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<i64>>,
    },
    /// Discrepancy and frequency search for unipotent affine orbits
    Equidist {
        #[arg(long)]
        system: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<String>>,
        #[arg(long)]
        degree: Option<usize>,
        /// Largest frequency entry
        #[arg(long)]
        bound: Option<i64>,
        /// Largest smoothness norm accepted
        #[arg(long)]
        threshold: Option<f64>,
    },
}

fn non_empty(v: Vec<String>) -> Option<Vec<String>> {
    (!v.is_empty()).then_some(v)
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Avg { .. } => "avg",
            Command::Recur { .. } => "recur",
            Command::Seminorm { .. } => "seminorm",
            Command::PetType { .. } => "pet-type",
            Command::PetTree { .. } => "pet-tree",
            Command::Taylor { .. } => "taylor",
            Command::Equidist { .. } => "equidist",
        }
    }

    /// Settings given as flags.
    fn flags(self, c: Common) -> RunConfig {
        let mut cfg = RunConfig {
            n: c.n,
            grid: c.grid,
            seed: c.seed,
            serial: flag(c.serial),
            out: c.out,
            checkpoints: c.checkpoints,
            tolerance: c.tolerance,
            ..Default::default()
        };
        match self {
            Command::Classify { exprs } => cfg.expressions = non_empty(exprs),
            Command::Avg { system, observables, sequences, compare, oscillation, threshold, from } => {
                cfg.system = system;
                cfg.observables = non_empty(observables);
                cfg.sequences = non_empty(sequences);
                cfg.compare = compare;
                cfg.oscillation = flag(oscillation);
                cfg.threshold = threshold;
                cfg.from = from;
            }
            Command::Recur { system, set, sequences, from } => {
                cfg.system = system;
                cfg.set = set;
                cfg.sequences = non_empty(sequences);
                cfg.from = from;
            }
            Command::Seminorm { system, observables, ell, moduli, trials } => {
                cfg.system = system;
                cfg.observables = non_empty(observables);
                cfg.ell = ell;
                cfg.moduli = moduli;
                cfg.trials = trials;
            }
            Command::PetType { family, hardy, pivot } => {
                cfg.family = family;
                cfg.hardy = flag(hardy);
                cfg.pivot = pivot;
            }
            Command::PetTree { family, hardy, count } => {
                cfg.family = family;
                cfg.hardy = flag(hardy);
                cfg.count = count;
            }
            Command::Taylor { exprs, at } => {
                cfg.expressions = non_empty(exprs);
                cfg.at = at;
            }
            Command::Equidist { system, point, degree, bound, threshold } => {
                cfg.system = system;
                cfg.point = point;
                cfg.degree = degree;
                cfg.bound = bound;
                cfg.threshold = threshold;
            }
        }
        cfg
    }
}

/// What goes to stdout when no output directory is given.
fn emit(report: &Report, text: Option<String>) -> Result<(), CliError> {
    match &report.config.out {
        Some(dir) => {
            report.write_to(dir)?;
            print!("{}", text.unwrap_or_default());
            print!("{}", report.summary());
        }
        None => match text {
            Some(t) => print!("{t}"),
            None => print!("{}", report.to_json()),
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let command = cli.command.name();
    let preset = cli.common.preset.clone();
    let file = cli.common.config.clone();
    let mut cfg = RunConfig::default();
    let mut property = None;
    if let Some(name) = &preset {
        let p = config::preset(name, command)?;
        cfg = (p.config)();
        property = Some(p.property);
    }
    if let Some(path) = &file {
        cfg = cfg.overlay(RunConfig::load(path)?);
    }
    cfg = cfg.overlay(cli.command.flags(cli.common));
    cfg.validate()?;
    if cfg.serial() {
        // one worker makes every parallel map in the library sequential
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build_global()
            .map_err(|e| CliError::runtime(e.to_string()))?;
    }

    let (mut report, text) = match command {
        "classify" => {
            let r = commands::classify(&cfg)?;
            let t = commands::classify_text(&r);
            (r, Some(t))
        }
        "avg" => (commands::avg(&cfg)?, None),
        "recur" => (commands::recur(&cfg)?, None),
        "seminorm" => (commands::seminorm(&cfg)?, None),
        "pet-type" => {
            let (r, types) = commands::pet_type(&cfg)?;
            let t: String = types.iter().map(|t| format!("{t}\n")).collect();
            (r, Some(t))
        }
        "pet-tree" => commands::pet_tree(&cfg)?,
        "taylor" => (commands::taylor(&cfg)?, None),
        "equidist" => (commands::equidist(&cfg)?, None),
        _ => unreachable!("every subcommand is dispatched"),
    };
    if let (Some(name), Some(prop)) = (preset, property) {
        report.preset = Some(name);
        let passed = report.verdicts.iter().filter(|v| v.passed).count();
        let detail = format!("{passed} of {} checks passed", report.verdicts.len());
        report.verdicts.insert(0, report::Verdict::new(prop, passed == report.verdicts.len(), detail));
    }
    emit(&report, text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
