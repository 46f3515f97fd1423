//! Pipeline stages behind the CLI subcommands. Stages communicate only
//! through files under the output directory, so deleting intermediates and
//! re-running any stage reproduces them, and every stage is a pure function
//! of (config, input files, seed).
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/<task>/demo.jsonl
//! <out>/<task>/anchors.json
//! <out>/<task>/<strategy>/seed<k>/{augmented.jsonl, policy.json, train_log.json, eval.json}
//! <out>/report.csv, <out>/report_pairwise.csv
//! <out>/sweep_aug.csv, <out>/sweep_aug_summary.csv   (and sweep_demo twins)
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

use guda_core::data::{read_dataset, write_dataset, DataError, Dataset, DatasetMeta, RngStream};
use guda_core::env::{EnvError, EnvModel};
use guda_core::eval::{
    compare_strategies, rollout, ComparisonReport, EvalError, EvalResult, NormalizationAnchors,
    RandomPolicy,
};
use guda_core::learner::{load_policy, save_policy, BcLearner, LearnError, TrainConfig};
use guda_core::sampling::{build_augmented_dataset, AugmentStats, AugmentationJob, SampleError};

use crate::config::{RunConfig, Strategy};
use crate::demonstrator::demonstrator_for;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Data(_) => 3,
            PipelineError::Numeric(_) => 4,
        }
    }
}

impl From<DataError> for PipelineError {
    fn from(e: DataError) -> Self {
        PipelineError::Data(e.to_string())
    }
}

impl From<SampleError> for PipelineError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::UnknownRule(_) => PipelineError::Config(e.to_string()),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

impl From<LearnError> for PipelineError {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::NonFiniteLoss { .. } => PipelineError::Numeric(e.to_string()),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for PipelineError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::DegenerateAnchors | EvalError::NonFiniteAction { .. } => {
                PipelineError::Numeric(e.to_string())
            }
            other => PipelineError::Data(other.to_string()),
        }
    }
}

impl From<EnvError> for PipelineError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::UnknownTask(_) | EnvError::Layout(_) => PipelineError::Config(e.to_string()),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

// Stream tags keeping demo, evaluation, and anchor draws independent.
const DEMO_STREAM_TAG: u64 = 0xD0;
const EVAL_STREAM_TAG: u64 = 0xE0;
const ANCHOR_SEED: u64 = 7777;
pub const ANCHOR_EPISODES: usize = 100;

/// File locations for one configured run.
pub struct Paths<'a> {
    cfg: &'a RunConfig,
}

impl<'a> Paths<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Paths { cfg }
    }

    pub fn task_dir(&self) -> PathBuf {
        self.cfg.out.join(&self.cfg.task)
    }

    pub fn demo(&self) -> PathBuf {
        self.task_dir().join("demo.jsonl")
    }

    pub fn demo_sized(&self, transitions: usize) -> PathBuf {
        self.task_dir().join(format!("demo_{transitions}.jsonl"))
    }

    pub fn anchors(&self) -> PathBuf {
        self.task_dir().join("anchors.json")
    }

    pub fn cell_dir(&self, strategy: Strategy, seed: u64) -> PathBuf {
        self.task_dir().join(strategy.name()).join(format!("seed{seed}"))
    }

    pub fn augmented(&self, strategy: Strategy, seed: u64) -> PathBuf {
        self.cell_dir(strategy, seed).join("augmented.jsonl")
    }

    pub fn policy(&self, strategy: Strategy, seed: u64) -> PathBuf {
        self.cell_dir(strategy, seed).join("policy.json")
    }

    pub fn train_log(&self, strategy: Strategy, seed: u64) -> PathBuf {
        self.cell_dir(strategy, seed).join("train_log.json")
    }

    pub fn eval(&self, strategy: Strategy, seed: u64) -> PathBuf {
        self.cell_dir(strategy, seed).join("eval.json")
    }

    pub fn report_csv(&self) -> PathBuf {
        self.cfg.out.join("report.csv")
    }

    pub fn report_pairwise_csv(&self) -> PathBuf {
        self.cfg.out.join("report_pairwise.csv")
    }
}

fn ensure_parent(path: &Path) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| PipelineError::Data(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(())
}

fn missing(stage: &str, path: &Path, upstream: &str) -> PipelineError {
    PipelineError::Data(format!(
        "{stage}: missing {} — run `{upstream}` first",
        path.display()
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoSummary {
    pub path: PathBuf,
    pub episodes: usize,
    pub transitions: usize,
    pub successful_episodes: usize,
}

/// Generate the demonstration dataset: `episodes` scripted episodes at the
/// configured noise level. If none succeeds, generation continues up to ten
/// times the budget and swaps the first success in; a dataset with zero
/// successful demonstrations is an error.
pub fn run_demo(cfg: &RunConfig) -> Result<DemoSummary, PipelineError> {
    let env = cfg.env()?;
    let path = Paths::new(cfg).demo();
    let summary = generate_demo_file(cfg, &env, cfg.demo_episodes, None, &path)?;
    Ok(summary)
}

fn generate_demo_file(
    cfg: &RunConfig,
    env: &EnvModel,
    episode_budget: usize,
    min_transitions: Option<usize>,
    path: &Path,
) -> Result<DemoSummary, PipelineError> {
    if episode_budget == 0 {
        return Err(PipelineError::Config("demo episode budget must be positive".into()));
    }
    let mut demonstrator = demonstrator_for(env, cfg.demo_noise);
    let stream = RngStream::new(cfg.demo_seed).derive(DEMO_STREAM_TAG);
    let mut episodes = Vec::new();
    let mut transitions = 0usize;
    let mut successes = 0usize;
    let mut drawn = 0u64;

    let wanted = |episodes: &Vec<guda_core::data::TrajectorySegment>, transitions: usize| match min_transitions {
        Some(n) => transitions < n,
        None => episodes.len() < episode_budget,
    };
    let hard_cap = match min_transitions {
        Some(_) => 100_000,
        None => episode_budget as u64 * 10,
    };

    while wanted(&episodes, transitions) && drawn < hard_cap {
        let (result, mut trajs) = rollout(&mut demonstrator, env, 1, stream.derive(drawn))?;
        drawn += 1;
        let ep = trajs.remove(0);
        transitions += ep.len();
        if result.successes[0] {
            successes += 1;
        }
        episodes.push(ep);
    }
    // The dataset must contain at least one successful demonstration.
    if successes == 0 {
        let mut found = None;
        while drawn < hard_cap {
            let (result, mut trajs) = rollout(&mut demonstrator, env, 1, stream.derive(drawn))?;
            drawn += 1;
            if result.successes[0] {
                found = Some(trajs.remove(0));
                break;
            }
        }
        let success_ep = found.ok_or_else(|| {
            PipelineError::Data(format!(
                "demo: no successful episode within {hard_cap} attempts at noise {}",
                cfg.demo_noise
            ))
        })?;
        *episodes.last_mut().expect("budget positive") = success_ep;
        successes = 1;
    }

    let dataset = Dataset::new(
        env.task.clone(),
        episodes,
        DatasetMeta {
            seed: Some(cfg.demo_seed),
            ..DatasetMeta::demo()
        },
    )?;
    ensure_parent(path)?;
    write_dataset(path, &dataset, &[])?;
    Ok(DemoSummary {
        path: path.to_path_buf(),
        episodes: dataset.episodes.len(),
        transitions: dataset.transition_count(),
        successful_episodes: successes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AugmentSummary {
    pub path: PathBuf,
    pub strategy: String,
    pub seed: u64,
    pub demo_transitions: usize,
    pub stats: AugmentStats,
}

pub fn run_augment(cfg: &RunConfig, strategy: Strategy, seed: u64) -> Result<AugmentSummary, PipelineError> {
    run_augment_at(cfg, strategy, seed, &Paths::new(cfg).demo(), &Paths::new(cfg).augmented(strategy, seed), cfg.target_for(strategy))
}

fn run_augment_at(
    cfg: &RunConfig,
    strategy: Strategy,
    seed: u64,
    demo_path: &Path,
    out_path: &Path,
    target: usize,
) -> Result<AugmentSummary, PipelineError> {
    let env = cfg.env()?;
    if !demo_path.exists() {
        return Err(missing("augment", demo_path, "demo"));
    }
    let source = read_dataset(demo_path)?;
    let rule = cfg.rule_for(&env, strategy)?;
    let job = AugmentationJob {
        source,
        rule,
        target_transitions: target,
        master_seed: seed,
    };
    let mut out = build_augmented_dataset(&job, &env)?;
    out.dataset.meta.rule = Some(match strategy {
        Strategy::Guda => job.rule.kind.name().to_string(),
        Strategy::Random => "random".to_string(),
        Strategy::None => "none".to_string(),
    });
    ensure_parent(out_path)?;
    write_dataset(out_path, &out.dataset, &out.provenance)?;
    Ok(AugmentSummary {
        path: out_path.to_path_buf(),
        strategy: strategy.name().to_string(),
        seed,
        demo_transitions: job.source.transition_count(),
        stats: out.stats,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainSummary {
    pub path: PathBuf,
    pub strategy: String,
    pub seed: u64,
    pub steps: usize,
    pub final_loss: f64,
}

#[derive(Serialize, Deserialize)]
struct TrainLog {
    seed: u64,
    steps: usize,
    final_loss: f64,
    /// Every hundredth step's loss, plus the final one.
    sampled_losses: Vec<f64>,
}

pub fn run_train(cfg: &RunConfig, strategy: Strategy, seed: u64) -> Result<TrainSummary, PipelineError> {
    let paths = Paths::new(cfg);
    run_train_at(cfg, strategy, seed, &paths.augmented(strategy, seed), &paths.policy(strategy, seed), &paths.train_log(strategy, seed))
}

fn run_train_at(
    cfg: &RunConfig,
    strategy: Strategy,
    seed: u64,
    aug_path: &Path,
    policy_path: &Path,
    log_path: &Path,
) -> Result<TrainSummary, PipelineError> {
    let env = cfg.env()?;
    if !aug_path.exists() {
        return Err(missing("train", aug_path, "augment"));
    }
    let dataset = read_dataset(aug_path)?;
    let learner = BcLearner::for_env(
        TrainConfig {
            seed,
            ..cfg.train.clone()
        },
        &env,
    );
    let (net, losses) = learner.train_net(&dataset, &env.mdp, seed)?;
    ensure_parent(policy_path)?;
    save_policy(policy_path, &net)?;
    let final_loss = losses.last().copied().unwrap_or(f64::NAN);
    let mut sampled: Vec<f64> = losses.iter().step_by(100).copied().collect();
    if let Some(last) = losses.last() {
        if sampled.last() != Some(last) {
            sampled.push(*last);
        }
    }
    let log = TrainLog {
        seed,
        steps: losses.len(),
        final_loss,
        sampled_losses: sampled,
    };
    let file = fs::File::create(log_path)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", log_path.display())))?;
    serde_json::to_writer(std::io::BufWriter::new(file), &log)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", log_path.display())))?;
    Ok(TrainSummary {
        path: policy_path.to_path_buf(),
        strategy: strategy.name().to_string(),
        seed,
        steps: losses.len(),
        final_loss,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalSummary {
    pub path: PathBuf,
    pub strategy: String,
    pub seed: u64,
    pub mean_return: f64,
    pub success_rate: f64,
}

pub fn run_eval(cfg: &RunConfig, strategy: Strategy, seed: u64) -> Result<EvalSummary, PipelineError> {
    let paths = Paths::new(cfg);
    run_eval_at(cfg, strategy, seed, &paths.policy(strategy, seed), &paths.eval(strategy, seed))
}

fn run_eval_at(
    cfg: &RunConfig,
    strategy: Strategy,
    seed: u64,
    policy_path: &Path,
    eval_path: &Path,
) -> Result<EvalSummary, PipelineError> {
    let env = cfg.env()?;
    if !policy_path.exists() {
        return Err(missing("eval", policy_path, "train"));
    }
    let mut net = load_policy(policy_path)?;
    let stream = RngStream::new(seed).derive(EVAL_STREAM_TAG);
    let (mut result, _) = rollout(&mut net, &env, cfg.eval_episodes, stream)?;
    result.strategy = strategy.name().to_string();
    result.seed = seed;
    ensure_parent(eval_path)?;
    let file = fs::File::create(eval_path)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", eval_path.display())))?;
    serde_json::to_writer(std::io::BufWriter::new(file), &result)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", eval_path.display())))?;
    Ok(EvalSummary {
        path: eval_path.to_path_buf(),
        strategy: strategy.name().to_string(),
        seed,
        mean_return: result.mean_return,
        success_rate: result.success_rate(),
    })
}

/// Run augment, train, and eval for one (strategy, seed) cell.
pub fn run_cell(cfg: &RunConfig, strategy: Strategy, seed: u64) -> Result<EvalSummary, PipelineError> {
    run_augment(cfg, strategy, seed)?;
    run_train(cfg, strategy, seed)?;
    run_eval(cfg, strategy, seed)
}

/// Run a stage over all configured seeds in parallel. Cells are independent
/// and write disjoint files, so scheduling cannot affect any output byte.
pub fn run_all_seeds<T: Send>(
    cfg: &RunConfig,
    f: impl Fn(u64) -> Result<T, PipelineError> + Sync,
) -> Result<Vec<T>, PipelineError> {
    cfg.seeds.par_iter().map(|&seed| f(seed)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnchorsFile {
    pub version: u32,
    pub task: String,
    pub episodes: usize,
    pub seed: u64,
    pub expert_return: f64,
    pub random_return: f64,
    pub expert_success_rate: f64,
    pub random_success_rate: f64,
}

/// Measure (or load cached) normalization anchors: mean return of the
/// noiseless scripted expert and of a uniform-random policy.
pub fn ensure_anchors(cfg: &RunConfig) -> Result<NormalizationAnchors, PipelineError> {
    let path = Paths::new(cfg).anchors();
    if path.exists() {
        let text = fs::read_to_string(&path)
            .map_err(|e| PipelineError::Data(format!("cannot read {}: {e}", path.display())))?;
        let anchors: AnchorsFile = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Data(format!("bad anchors file {}: {e}", path.display())))?;
        return Ok(NormalizationAnchors {
            expert_return: anchors.expert_return,
            random_return: anchors.random_return,
        });
    }
    let env = cfg.env()?;
    let mut expert = demonstrator_for(&env, 0.0);
    let (expert_result, _) = rollout(
        &mut expert,
        &env,
        ANCHOR_EPISODES,
        RngStream::new(ANCHOR_SEED).derive(1),
    )?;
    let mut random = RandomPolicy::for_env(&env);
    let (random_result, _) = rollout(
        &mut random,
        &env,
        ANCHOR_EPISODES,
        RngStream::new(ANCHOR_SEED).derive(2),
    )?;
    if expert_result.mean_return == random_result.mean_return {
        return Err(PipelineError::Numeric(
            "anchor returns are degenerate (expert == random)".into(),
        ));
    }
    let anchors = AnchorsFile {
        version: 1,
        task: env.task.clone(),
        episodes: ANCHOR_EPISODES,
        seed: ANCHOR_SEED,
        expert_return: expert_result.mean_return,
        random_return: random_result.mean_return,
        expert_success_rate: expert_result.success_rate(),
        random_success_rate: random_result.success_rate(),
    };
    ensure_parent(&path)?;
    let file = fs::File::create(&path)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", path.display())))?;
    serde_json::to_writer(std::io::BufWriter::new(file), &anchors)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(NormalizationAnchors {
        expert_return: anchors.expert_return,
        random_return: anchors.random_return,
    })
}

/// Aggregate every eval file found under the task directory into the
/// comparison report and the two CSV files.
pub fn run_report(cfg: &RunConfig) -> Result<ComparisonReport, PipelineError> {
    let anchors = ensure_anchors(cfg)?;
    let paths = Paths::new(cfg);
    let mut grouped: BTreeMap<String, Vec<EvalResult>> = BTreeMap::new();
    for strategy in Strategy::ALL {
        let dir = paths.task_dir().join(strategy.name());
        if !dir.is_dir() {
            continue;
        }
        let mut seed_dirs: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| PipelineError::Data(format!("cannot read {}: {e}", dir.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        seed_dirs.sort();
        for seed_dir in seed_dirs {
            let eval_path = seed_dir.join("eval.json");
            if !eval_path.exists() {
                continue;
            }
            let text = fs::read_to_string(&eval_path)
                .map_err(|e| PipelineError::Data(format!("cannot read {}: {e}", eval_path.display())))?;
            let result: EvalResult = serde_json::from_str(&text)
                .map_err(|e| PipelineError::Data(format!("bad eval file {}: {e}", eval_path.display())))?;
            grouped.entry(strategy.name().to_string()).or_default().push(result);
        }
    }
    if grouped.is_empty() {
        return Err(missing("report", &paths.task_dir().join("*/seed*/eval.json"), "eval"));
    }
    let report = compare_strategies(&grouped, &anchors, cfg.bootstrap_resamples, cfg.confidence_level)?;

    let mut csv = String::from("task,strategy,seeds,IQM_norm_return,CI_low,CI_high,success_rate\n");
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.task, row.strategy, row.seeds, row.iqm_norm_return, row.ci_low, row.ci_high, row.success_rate
        ));
    }
    write_text(&paths.report_csv(), &csv)?;

    let mut pairwise = String::from("task,strategy_a,strategy_b,p_value\n");
    for t in &report.pairwise {
        pairwise.push_str(&format!("{},{},{},{}\n", cfg.task, t.strategy_a, t.strategy_b, t.p_value));
    }
    write_text(&paths.report_pairwise_csv(), &pairwise)?;
    Ok(report)
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    ensure_parent(path)?;
    let mut file = fs::File::create(path)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(text.as_bytes())
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", path.display())))
}

/// One sweep grid point, evaluated at one seed.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub strategy: String,
    pub x: usize,
    pub seed: u64,
    pub norm_return: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub per_seed_csv: PathBuf,
    pub summary_csv: PathBuf,
}

fn sweep_cell_dirs(task_dir: &Path, sweep: &str, strategy: Strategy, x: usize, seed: u64) -> PathBuf {
    task_dir
        .join(sweep)
        .join(strategy.name())
        .join(format!("x{x}"))
        .join(format!("seed{seed}"))
}

fn run_sweep(
    cfg: &RunConfig,
    sweep_name: &str,
    xs: &[usize],
    demo_for_x: impl Fn(usize) -> Result<PathBuf, PipelineError> + Sync,
    target_for_x: impl Fn(usize) -> usize + Sync,
) -> Result<SweepOutcome, PipelineError> {
    if xs.is_empty() {
        return Err(PipelineError::Config(format!("{sweep_name}: empty grid")));
    }
    let anchors = ensure_anchors(cfg)?;
    let paths = Paths::new(cfg);
    let strategies = [Strategy::Guda, Strategy::Random];

    // Demo files are shared across cells; materialize them up front.
    let mut demo_paths = BTreeMap::new();
    for &x in xs {
        demo_paths.insert(x, demo_for_x(x)?);
    }

    let mut cells = Vec::new();
    for &strategy in &strategies {
        for &x in xs {
            for &seed in &cfg.seeds {
                cells.push((strategy, x, seed));
            }
        }
    }
    let points: Vec<SweepPoint> = cells
        .par_iter()
        .map(|&(strategy, x, seed)| -> Result<SweepPoint, PipelineError> {
            let dir = sweep_cell_dirs(&paths.task_dir(), sweep_name, strategy, x, seed);
            let aug = dir.join("augmented.jsonl");
            let policy = dir.join("policy.json");
            let log = dir.join("train_log.json");
            let eval_path = dir.join("eval.json");
            run_augment_at(cfg, strategy, seed, &demo_paths[&x], &aug, target_for_x(x))?;
            run_train_at(cfg, strategy, seed, &aug, &policy, &log)?;
            let summary = run_eval_at(cfg, strategy, seed, &policy, &eval_path)?;
            let norm = guda_core::eval::normalized_return(summary.mean_return, &anchors)?;
            Ok(SweepPoint {
                strategy: strategy.name().to_string(),
                x,
                seed,
                norm_return: norm,
                success_rate: summary.success_rate,
            })
        })
        .collect::<Result<_, _>>()?;

    let per_seed_csv = cfg.out.join(format!("{sweep_name}.csv"));
    let mut csv = String::from("task,strategy,x,seed,norm_return,success_rate\n");
    for p in &points {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            cfg.task, p.strategy, p.x, p.seed, p.norm_return, p.success_rate
        ));
    }
    write_text(&per_seed_csv, &csv)?;

    let summary_csv = cfg.out.join(format!("{sweep_name}_summary.csv"));
    let mut csv = String::from("task,strategy,x,IQM_norm_return,CI_low,CI_high\n");
    for &strategy in &strategies {
        for &x in xs {
            let values: Vec<f64> = points
                .iter()
                .filter(|p| p.strategy == strategy.name() && p.x == x)
                .map(|p| p.norm_return)
                .collect();
            let iqm = guda_core::eval::iqm(&values)?;
            let mut rng = RngStream::new(0).derive(0x5EED).rng();
            let (lo, hi) = if values.len() >= 2 {
                guda_core::eval::bootstrap_ci(
                    &values,
                    |v| guda_core::eval::iqm(v).expect("nonempty"),
                    cfg.bootstrap_resamples.max(100),
                    cfg.confidence_level,
                    &mut rng,
                )?
            } else {
                (iqm, iqm)
            };
            csv.push_str(&format!("{},{},{},{},{},{}\n", cfg.task, strategy.name(), x, iqm, lo, hi));
        }
    }
    write_text(&summary_csv, &csv)?;

    Ok(SweepOutcome {
        points,
        per_seed_csv,
        summary_csv,
    })
}

/// Augmentation-count ablation: full pipeline per (strategy, count, seed).
pub fn run_sweep_aug_count(cfg: &RunConfig, counts: &[usize]) -> Result<SweepOutcome, PipelineError> {
    let paths = Paths::new(cfg);
    let demo = paths.demo();
    if !demo.exists() {
        run_demo(cfg)?;
    }
    run_sweep(cfg, "sweep_aug", counts, |_| Ok(paths.demo()), |x| x)
}

/// Demonstration-size ablation: demo datasets of the given transition
/// counts, fixed augmentation target.
pub fn run_sweep_demo_size(cfg: &RunConfig, sizes: &[usize]) -> Result<SweepOutcome, PipelineError> {
    let env = cfg.env()?;
    let paths = Paths::new(cfg);
    run_sweep(
        cfg,
        "sweep_demo",
        sizes,
        |size| {
            let path = paths.demo_sized(size);
            if !path.exists() {
                generate_demo_file(cfg, &env, cfg.demo_episodes.max(1), Some(size), &path)?;
            }
            Ok(path)
        },
        |_| cfg.target_transitions,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub path: PathBuf,
    pub episodes: usize,
    pub transitions: usize,
    pub reward_violations: usize,
    pub chain_violations: usize,
    pub validity_violations: usize,
}

/// Re-check the invariants of a dataset file: rewards equal the task model's
/// reward bitwise, chaining is exact, and every episode is valid in-task.
pub fn run_audit(cfg: &RunConfig, file: &Path) -> Result<AuditReport, PipelineError> {
    let env = cfg.env()?;
    if !file.exists() {
        return Err(missing("audit", file, "augment"));
    }
    let dataset = read_dataset(file)?;
    let mut reward_violations = 0usize;
    let mut chain_violations = 0usize;
    let mut validity_violations = 0usize;
    for ep in &dataset.episodes {
        if !guda_core::data::chain_check(ep) {
            chain_violations += 1;
        }
        if !env.is_valid(ep) {
            validity_violations += 1;
        }
        for t in &ep.transitions {
            let expected = env.reward(&t.state, &t.action);
            if t.reward.to_bits() != expected.to_bits() {
                reward_violations += 1;
            }
        }
    }
    let report = AuditReport {
        path: file.to_path_buf(),
        episodes: dataset.episodes.len(),
        transitions: dataset.transition_count(),
        reward_violations,
        chain_violations,
        validity_violations,
    };
    if reward_violations + chain_violations + validity_violations > 0 {
        return Err(PipelineError::Data(format!(
            "audit failed on {}: {} reward, {} chain, {} validity violations over {} transitions",
            file.display(),
            reward_violations,
            chain_violations,
            validity_violations,
            report.transitions
        )));
    }
    Ok(report)
}
