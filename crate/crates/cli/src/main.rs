//! `clarity`: predict whether a query needs a clarifying question from
//! the connectivity of its retrieved passages, and evaluate the result.

mod commands;
mod config;
mod failure;

use clap::{Parser, Subcommand};
use config::RunConfig;
use failure::Failure;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "clarity", version, about)]
struct Cli {
    /// TOML run configuration; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a BM25 index from --corpus into --out
    Index,
    /// Score every dataset query with --method and write a run file
    Predict {
        /// Only write the pair requests a graph method would send, as
        /// protocol lines, for offline scoring
        #[arg(long)]
        emit_pair_requests: Option<PathBuf>,
        /// Take k from the `selected_k` of a sweep JSON
        #[arg(long)]
        k_from: Option<PathBuf>,
    },
    /// AUC and ROC for run files, with paired significance between them;
    /// AmbigNQ datasets produce bucket tables instead
    Evaluate {
        /// Run file (repeatable)
        #[arg(long = "run", required = true)]
        runs: Vec<PathBuf>,
        /// Fixed decision threshold for bucket tables
        #[arg(long)]
        bucket_threshold: Option<f64>,
        /// Dev-split run per --run, used to pick the bucket threshold
        #[arg(long = "dev-run")]
        dev_runs: Vec<PathBuf>,
        /// Labelled ClariQ-format dev set for threshold selection
        #[arg(long)]
        dev_dataset: Option<PathBuf>,
    },
    /// Dev AUC of --method at each depth in --ks
    Sweep,
    /// Write the coherency network of one query as Graphviz DOT
    ExportGraph {
        #[arg(long)]
        query_id: String,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| Failure::usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    let cfg = base.overlay(cli.flags);
    cfg.validate().map_err(|e| Failure::usage(format!("{e:#}")))?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    log::debug!("resolved config: {:?}", cfg.resolved());
    match cli.command {
        Command::Index => commands::index(&cfg),
        Command::Predict {
            emit_pair_requests,
            k_from,
        } => commands::predict(
            &cfg,
            &commands::PredictOptions {
                emit_pair_requests,
                k_from,
            },
        ),
        Command::Evaluate {
            runs,
            bucket_threshold,
            dev_runs,
            dev_dataset,
        } => commands::evaluate(
            &cfg,
            &commands::EvaluateOptions {
                runs,
                bucket_threshold,
                dev_runs,
                dev_dataset,
            },
        ),
        Command::Sweep => commands::sweep(&cfg),
        Command::ExportGraph { query_id } => commands::export_graph(&cfg, &query_id),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
