//! `sentwb`: run encoder × model sentiment experiments from a TOML config.
//!
//! Exit codes: 0 when every cell succeeds, 2 when some cells fail, 1 when the
//! config or corpus cannot be used at all.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sentiment_workbench::corpus::{load_corpus, write_corpus, CorpusFormat};
use sentiment_workbench::experiment::{
    export_splits, inspect_corpus, run_experiment, validate_config, ExperimentConfig,
};
use sentiment_workbench::preprocess::{default_stoplist, parse_stoplist};
use sentiment_workbench::synth::{generate_synthetic_corpus, SynthConfig};

#[derive(Parser)]
#[command(name = "sentwb", version, about = "Tweet sentiment classification workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full encoder × model grid and write results, tables and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Augment only the training split, after splitting.
        #[arg(long)]
        augment_after_split: bool,
        /// Run grid cells one at a time.
        #[arg(long)]
        serial: bool,
    },
    /// Check a config and report every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print class counts and a token-length histogram for a corpus.
    InspectCorpus {
        /// A corpus file, or an experiment config naming one.
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        format: Option<CorpusFormat>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the train and test splits (after augmentation) as JSONL.
    ExportSplits {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        augment_after_split: bool,
    },
    /// Write a seeded synthetic three-class corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 600)]
        docs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn load_config(path: &Path, seed: Option<u64>, augment_after_split: bool) -> Result<ExperimentConfig> {
    let mut config = validate_config(path).with_context(|| format!("invalid config {}", path.display()))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if augment_after_split {
        config.augment_after_split = true;
    }
    Ok(config)
}

fn format_for(path: &Path) -> CorpusFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("jsonl") => CorpusFormat::Jsonl,
        _ => CorpusFormat::Csv,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            augment_after_split,
            serial,
        } => {
            let mut config = load_config(&config, seed, augment_after_split)?;
            if serial {
                config.parallel = false;
            }
            let out = out.unwrap_or_else(|| config.output_dir.clone());
            let mut outcome = run_experiment(&config).context("experiment failed")?;
            outcome
                .write_to(&out)
                .with_context(|| format!("cannot write results to {}", out.display()))?;
            print!("{}", outcome.tables);
            for failure in &outcome.failures {
                eprintln!("{failure}");
            }
            eprintln!(
                "{} of {} cells succeeded; results in {}",
                outcome.manifest.cells_succeeded,
                outcome.manifest.cells_total,
                out.display()
            );
            Ok(if outcome.is_complete() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Validate { config } => match validate_config(&config) {
            Ok(_) => {
                println!("{}: ok", config.display());
                Ok(ExitCode::SUCCESS)
            }
            Err(errors) => {
                for e in &errors.0 {
                    eprintln!("{e}");
                }
                Ok(ExitCode::from(1))
            }
        },
        Command::InspectCorpus { corpus, format, config } => {
            let (corpus, preprocess, stoplist) = match (corpus, config) {
                (Some(path), _) => {
                    let format = format.unwrap_or_else(|| format_for(&path));
                    let corpus =
                        load_corpus(&path, format).with_context(|| format!("cannot load {}", path.display()))?;
                    (corpus, Default::default(), default_stoplist())
                }
                (None, Some(config)) => {
                    let config = load_config(&config, None, false)?;
                    let corpus = load_corpus(&config.corpus_path, config.corpus_format)
                        .with_context(|| format!("cannot load {}", config.corpus_path.display()))?;
                    let stoplist = match &config.stopwords_path {
                        Some(p) => parse_stoplist(
                            &std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?,
                        ),
                        None => default_stoplist(),
                    };
                    (corpus, config.preprocess, stoplist)
                }
                (None, None) => unreachable!("clap requires --corpus or --config"),
            };
            print!("{}", inspect_corpus(&corpus, &preprocess, &stoplist));
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportSplits {
            config,
            seed,
            out,
            augment_after_split,
        } => {
            let config = load_config(&config, seed, augment_after_split)?;
            let (train, test) = export_splits(&config, &out).context("cannot export splits")?;
            println!("{}\n{}", train.display(), test.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { out, docs, seed } => {
            anyhow::ensure!(docs > 0, "--docs must be at least 1");
            let corpus = generate_synthetic_corpus(&SynthConfig {
                n_docs: docs,
                seed,
                ..SynthConfig::default()
            });
            write_corpus(&corpus, &out, format_for(&out)).with_context(|| format!("cannot write {}", out.display()))?;
            println!("{} documents written to {}", corpus.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
