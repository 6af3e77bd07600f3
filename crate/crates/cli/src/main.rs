//! `mertens`: lattice search for large values of damped zeta-zero cosine sums.
//!
//! Stages communicate through files in the `--out` directory; `run` chains
//! them all. Exit codes: 0 success, 2 configuration error, 3 stage failure,
//! 4 incomplete (a search cap was reached).

mod artifacts;
mod config;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ConfigArgs;
use stages::{ConfigError, Ctx, StageFailure, Status};

#[derive(Parser)]
#[command(name = "mertens", version, about = "Lattice search for large values of damped zeta-zero sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read and weight the zero data; writes dataset.json.
    Ingest {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Build the lattice and target; writes instance.json, basis.txt, target.txt.
    Build {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Also write the basis here.
        #[arg(long, value_name = "FILE")]
        dump_basis: Option<PathBuf>,
    },
    /// LLL and progressive BKZ; writes reduced.txt, transform.txt, reduction.json.
    Reduce {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Reduce this basis instead of the run's basis.txt.
        #[arg(long, value_name = "FILE")]
        load_basis: Option<PathBuf>,
        /// Also write the reduced basis here.
        #[arg(long, value_name = "FILE")]
        dump_basis: Option<PathBuf>,
    },
    /// Enumerate lattice points near the target; writes candidates.jsonl.
    Enumerate {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Certified evaluation of every candidate; writes reports.jsonl and correlation.csv.
    Evaluate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// JSONL with a decimal "y" string per line (default: the run's candidates.jsonl).
        #[arg(long, value_name = "FILE")]
        candidates: Option<PathBuf>,
    },
    /// Summarize reports.jsonl, or tabulate the sum at the given --y values.
    Report {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Evaluate at this decimal y instead of summarizing (repeatable).
        #[arg(long = "y", value_name = "DECIMAL")]
        ys: Vec<String>,
    },
    /// Every stage in order.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

enum Failure {
    Config(anyhow::Error),
    Stage(StageFailure),
}

impl From<StageFailure> for Failure {
    fn from(f: StageFailure) -> Self {
        if f.error.chain().any(|c| c.is::<ConfigError>()) {
            Failure::Config(f.error)
        } else {
            Failure::Stage(f)
        }
    }
}

fn open(cfg: &ConfigArgs) -> Result<Ctx, Failure> {
    let resolved = cfg.resolve().map_err(Failure::Config)?;
    Ctx::open(resolved).map_err(|error| Failure::Stage(StageFailure { stage: "setup", error }))
}

fn dispatch(command: Command) -> Result<Status, Failure> {
    use stages::tagged;
    match command {
        Command::Ingest { cfg } => {
            let ctx = open(&cfg)?;
            tagged("ingest", stages::ingest(&ctx))?;
        }
        Command::Build { cfg, dump_basis } => {
            let ctx = open(&cfg)?;
            let ds = tagged("build", ctx.dataset(false))?;
            let inst = tagged("build", stages::build(&ctx, &ds))?;
            if let Some(p) = dump_basis {
                tagged("build", inst.basis.write_to(&p).map_err(anyhow::Error::from))?;
            }
        }
        Command::Reduce {
            cfg,
            load_basis,
            dump_basis,
        } => {
            let ctx = open(&cfg)?;
            tagged("reduce", stages::reduce(&ctx, load_basis.as_deref(), dump_basis.as_deref()))?;
        }
        Command::Enumerate { cfg } => {
            let ctx = open(&cfg)?;
            let ds = tagged("enumerate", ctx.dataset(false))?;
            return Ok(tagged("enumerate", stages::enumerate(&ctx, &ds))?);
        }
        Command::Evaluate { cfg, candidates } => {
            let ctx = open(&cfg)?;
            let ds = tagged("evaluate", ctx.dataset(false))?;
            tagged("evaluate", stages::evaluate_stage(&ctx, &ds, candidates.as_deref()))?;
        }
        Command::Report { cfg, ys } => {
            let ctx = open(&cfg)?;
            let text = if ys.is_empty() {
                tagged("report", stages::report(&ctx))?
            } else {
                let ds = tagged("report", ctx.dataset(false))?;
                tagged("report", stages::report_values(&ctx, &ds, &ys))?
            };
            print!("{text}");
        }
        Command::Run { cfg } => {
            let ctx = open(&cfg)?;
            return Ok(stages::run(&ctx)?);
        }
    }
    Ok(Status::Complete)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Incomplete(reason)) => {
            eprintln!("incomplete: {reason}");
            ExitCode::from(4)
        }
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Stage(f)) => {
            eprintln!("{f}");
            ExitCode::from(3)
        }
    }
}
