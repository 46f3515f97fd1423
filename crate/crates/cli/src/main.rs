//! `guda`: demonstration generation, guided/random trajectory augmentation,
//! behavior cloning, evaluation, and comparison reports, wired as file-based
//! pipeline stages.
//!
//! Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use guda_cli::config::{FileConfig, RunConfig, Strategy};
use guda_cli::pipeline::{self, PipelineError};

#[derive(Parser)]
#[command(name = "guda", version, about = "Guided data augmentation pipeline for offline learning from demonstration")]
struct Cli {
    /// TOML run configuration; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Single seed for per-seed stages (default: every seed in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory root.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Augmentation strategy for per-strategy stages.
    #[arg(long, global = true, value_enum, default_value = "guda")]
    strategy: Strategy,
    /// Task name (maze-umaze, maze-medium, maze-large, maze-arena, parking,
    /// soccer).
    #[arg(long, global = true)]
    task: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the scripted demonstration dataset.
    Demo {
        /// Episode count override.
        #[arg(long)]
        episodes: Option<usize>,
        /// Suboptimality knob in [0, 1].
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Build the augmented dataset for --strategy and --seed.
    Augment {
        /// Target augmented transition count override.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Train the behavior-cloning policy on the augmented dataset.
    Train,
    /// Roll out the trained policy and record per-episode results.
    Eval,
    /// Aggregate every eval file into report.csv and report_pairwise.csv.
    Report,
    /// Augmentation-count ablation over the full pipeline.
    SweepAug {
        /// Comma-separated augmented-transition counts.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
    },
    /// Demonstration-size ablation over the full pipeline.
    SweepDemo {
        /// Comma-separated demonstration transition counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Re-check reward exactness, chaining, and validity of a dataset file.
    Audit {
        /// Dataset to audit (default: the --strategy/--seed augmented file).
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig, PipelineError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::from_sections(FileConfig::default()),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(task) = &cli.task {
        cfg.task = task.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    if cfg.seeds.is_empty() {
        return Err(PipelineError::Config("seeds list is empty".into()));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = build_config(&cli)?;
    let strategy = cli.strategy;
    match cli.command {
        Command::Demo { episodes, noise } => {
            if let Some(e) = episodes {
                cfg.demo_episodes = e;
            }
            if let Some(n) = noise {
                cfg.demo_noise = n;
            }
            let s = pipeline::run_demo(&cfg)?;
            println!(
                "demo: {} episodes ({} successful), {} transitions -> {}",
                s.episodes,
                s.successful_episodes,
                s.transitions,
                s.path.display()
            );
        }
        Command::Augment { n } => {
            if let Some(n) = n {
                cfg.target_transitions = n;
            }
            let summaries = pipeline::run_all_seeds(&cfg, |seed| pipeline::run_augment(&cfg, strategy, seed))?;
            for s in summaries {
                println!(
                    "augment[{} seed {}]: {} demo + {} augmented transitions in {} episodes ({} windows abandoned) -> {}",
                    s.strategy,
                    s.seed,
                    s.demo_transitions,
                    s.stats.augmented_transitions,
                    s.stats.emitted_episodes,
                    s.stats.window_failures,
                    s.path.display()
                );
            }
        }
        Command::Train => {
            let summaries = pipeline::run_all_seeds(&cfg, |seed| pipeline::run_train(&cfg, strategy, seed))?;
            for s in summaries {
                println!(
                    "train[{} seed {}]: {} steps, final loss {:.6} -> {}",
                    s.strategy,
                    s.seed,
                    s.steps,
                    s.final_loss,
                    s.path.display()
                );
            }
        }
        Command::Eval => {
            let summaries = pipeline::run_all_seeds(&cfg, |seed| pipeline::run_eval(&cfg, strategy, seed))?;
            for s in summaries {
                println!(
                    "eval[{} seed {}]: mean return {:.4}, success rate {:.2} -> {}",
                    s.strategy,
                    s.seed,
                    s.mean_return,
                    s.success_rate,
                    s.path.display()
                );
            }
        }
        Command::Report => {
            let report = pipeline::run_report(&cfg)?;
            println!("strategy ranking for {}:", cfg.task);
            for (i, row) in report.rows.iter().enumerate() {
                println!(
                    "  {}. {:<8} IQM {:>8.2}  CI [{:.2}, {:.2}]  success {:.2}  ({} seeds)",
                    i + 1,
                    row.strategy,
                    row.iqm_norm_return,
                    row.ci_low,
                    row.ci_high,
                    row.success_rate,
                    row.seeds
                );
            }
            for t in &report.pairwise {
                println!("  p[{} vs {}] = {:.4}", t.strategy_a, t.strategy_b, t.p_value);
            }
        }
        Command::SweepAug { counts } => {
            let outcome = pipeline::run_sweep_aug_count(&cfg, &counts)?;
            println!(
                "sweep-aug: {} points -> {} and {}",
                outcome.points.len(),
                outcome.per_seed_csv.display(),
                outcome.summary_csv.display()
            );
        }
        Command::SweepDemo { sizes } => {
            let outcome = pipeline::run_sweep_demo_size(&cfg, &sizes)?;
            println!(
                "sweep-demo: {} points -> {} and {}",
                outcome.points.len(),
                outcome.per_seed_csv.display(),
                outcome.summary_csv.display()
            );
        }
        Command::Audit { file } => {
            let seed = cfg.seeds[0];
            let path = file.unwrap_or_else(|| pipeline::Paths::new(&cfg).augmented(strategy, seed));
            let report = pipeline::run_audit(&cfg, &path)?;
            println!(
                "audit: {} episodes, {} transitions, 0 violations -> ok ({})",
                report.episodes,
                report.transitions,
                report.path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
