//! `aligneval`: manifest-driven front end for the alignment evaluation
//! pipeline. Subcommands cover corpus checking (`validate`), cleaning and
//! bookkeeping (`prep`), dictionary building (`dict`), boundary
//! evaluation (`eval`) and vowel-space comparison (`vowels`).
//!
//! Exit codes: 0 success, 1 data errors, 2 configuration or usage errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    /// Startup problems: bad flags, unreadable config, unparsable
    /// referenced files. Reported as a consolidated list, exit code 2.
    #[error("configuration errors")]
    Config(Vec<String>),

    /// Problems with the corpus data itself. Exit code 1.
    #[error("{0}")]
    Data(String),
}

#[derive(Parser)]
#[command(
    name = "aligneval",
    version,
    about = "Evaluate forced-alignment output against human annotation"
)]
struct Cli {
    /// JSON run configuration. Falls back to $ALIGNEVAL_CONFIG.
    #[arg(long, global = true, env = "ALIGNEVAL_CONFIG", value_name = "FILE")]
    config: Option<PathBuf>,

    /// Manifest CSV (audio,textgrid,language,split). Overrides the config.
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Output directory (created if absent). Overrides the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Tag naming the aligner model under evaluation.
    #[arg(long, global = true, value_name = "TAG")]
    model_tag: Option<String>,

    /// Tag naming the training/testing setting under evaluation.
    #[arg(long, global = true, value_name = "TAG")]
    setting_tag: Option<String>,

    /// Treat warnings (skipped files, dropped tokens) as errors.
    #[arg(long, global = true)]
    strict: bool,

    /// Worker threads for file-level parallelism; 0 means one per core.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse every WAV and TextGrid in the manifest and report problems.
    Validate,
    /// Clean transcripts, filter too-short words, and summarise the
    /// dataset per language and split.
    Prep,
    /// Build a pronunciation dictionary from the corpus wordlist.
    Dict,
    /// Compare hypothesis phone boundaries against the gold annotation.
    Eval {
        /// Directory of gold TextGrids; defaults to the manifest paths.
        #[arg(long, value_name = "DIR")]
        gold_dir: Option<PathBuf>,
        /// Directory of hypothesis TextGrids named like the gold files.
        #[arg(long, value_name = "DIR")]
        hyp_dir: PathBuf,
        /// Additionally write per-file statistics.
        #[arg(long)]
        per_file: bool,
    },
    /// Measure vowel formants under gold and hypothesis segmentations and
    /// draw the comparison chart.
    Vowels {
        /// Directory of gold TextGrids; defaults to the manifest paths.
        #[arg(long, value_name = "DIR")]
        gold_dir: Option<PathBuf>,
        /// Hypothesis directory as NAME=DIR; repeatable, one per model.
        /// A bare DIR uses the directory name as the model tag.
        #[arg(long = "hyp-dir", value_name = "NAME=DIR", required = true)]
        hyp_dirs: Vec<String>,
        /// Multiplier applied to ellipse semi-axes when drawing.
        #[arg(long, default_value_t = 1.0, value_name = "X")]
        ellipse_scale: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(errors)) => {
            for e in &errors {
                eprintln!("config error: {e}");
            }
            eprintln!("{} configuration error(s), nothing was run", errors.len());
            ExitCode::from(2)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        manifest: cli.manifest.clone(),
        out_dir: cli.out.clone(),
        model_tag: cli.model_tag.clone(),
        setting_tag: cli.setting_tag.clone(),
    };
    let config = RunConfig::load(cli.config.as_deref(), &overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::Config(vec![format!("cannot build worker pool: {e}")]))?;

    match cli.command {
        Command::Validate => commands::validate::run(&config, &pool, cli.strict),
        Command::Prep => commands::prep::run(&config, &pool, cli.strict),
        Command::Dict => commands::dict::run(&config, cli.strict),
        Command::Eval {
            gold_dir,
            hyp_dir,
            per_file,
        } => commands::eval::run(&config, &pool, cli.strict, gold_dir.as_deref(), &hyp_dir, per_file),
        Command::Vowels {
            gold_dir,
            hyp_dirs,
            ellipse_scale,
        } => {
            if !(ellipse_scale.is_finite() && ellipse_scale > 0.0) {
                return Err(CliError::Config(vec![format!(
                    "--ellipse-scale must be a positive number, got {ellipse_scale}"
                )]));
            }
            commands::vowels::run(
                &config,
                &pool,
                cli.strict,
                gold_dir.as_deref(),
                &hyp_dirs,
                ellipse_scale,
            )
        }
    }
}
