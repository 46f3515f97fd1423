//! Policy evaluation and the comparison statistics: per-episode rollouts,
//! normalized returns, inter-quartile means, percentile-bootstrap confidence
//! intervals, and pairwise Welch t-tests across strategies.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::data::{RngStream, TrajectorySegment, Transition};
use crate::env::EnvModel;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty values")]
    EmptyValues,
    #[error("need at least {need} values, got {got}")]
    TooFewValues { need: usize, got: usize },
    #[error("degenerate normalization anchors (expert == random)")]
    DegenerateAnchors,
    #[error("non-finite action at episode {episode}, step {step}")]
    NonFiniteAction { episode: usize, step: usize },
    #[error("need at least two strategies and two seeds each")]
    TooFewStrategies,
    #[error("mismatched tasks across strategies: {0} vs {1}")]
    MismatchedTasks(String, String),
    #[error("invalid bootstrap parameters")]
    BadBootstrapParams,
}

/// Anything that maps states to actions during a rollout. Implementations
/// may keep per-episode internal state (controllers) and draw exploration
/// noise from the provided generator.
pub trait Policy {
    /// Called once at the start of each episode.
    fn reset(&mut self, _rng: &mut ChaCha8Rng) {}
    fn act(&mut self, state: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Uniform-random policy over the action box; the normalization baseline.
pub struct RandomPolicy {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl RandomPolicy {
    pub fn for_env(env: &EnvModel) -> RandomPolicy {
        RandomPolicy {
            low: env.mdp.action_low.clone(),
            high: env.mdp.action_high.clone(),
        }
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, _state: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.low
            .iter()
            .zip(&self.high)
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect()
    }
}

/// Per-run evaluation record: one entry per episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub task: String,
    pub strategy: String,
    pub seed: u64,
    pub returns: Vec<f64>,
    pub successes: Vec<bool>,
    pub lengths: Vec<usize>,
    /// Mean of `returns`; the per-seed aggregate the report consumes.
    pub mean_return: f64,
}

impl EvalResult {
    pub fn success_rate(&self) -> f64 {
        if self.successes.is_empty() {
            0.0
        } else {
            self.successes.iter().filter(|s| **s).count() as f64 / self.successes.len() as f64
        }
    }
}

/// Roll out `episodes` episodes of at most `horizon` steps each, stopping
/// early on terminal states. Episodes draw from independent child streams,
/// so results are reproducible regardless of evaluation order.
pub fn rollout(
    policy: &mut dyn Policy,
    env: &EnvModel,
    episodes: usize,
    stream: RngStream,
) -> Result<(EvalResult, Vec<TrajectorySegment>), EvalError> {
    assert!(episodes >= 1, "need at least one episode");
    let mut returns = Vec::with_capacity(episodes);
    let mut successes = Vec::with_capacity(episodes);
    let mut lengths = Vec::with_capacity(episodes);
    let mut trajectories = Vec::with_capacity(episodes);

    for episode in 0..episodes {
        let mut rng = stream.derive(episode as u64).rng();
        policy.reset(&mut rng);
        let mut state = env.sample_initial(&mut rng);
        let mut transitions = Vec::new();
        let mut total = 0.0;
        for step in 0..env.mdp.horizon {
            let action = policy.act(&state, &mut rng);
            if !action.iter().all(|a| a.is_finite()) {
                return Err(EvalError::NonFiniteAction { episode, step });
            }
            let action: Vec<f64> = action
                .iter()
                .zip(env.mdp.action_low.iter().zip(&env.mdp.action_high))
                .map(|(a, (lo, hi))| a.clamp(*lo, *hi))
                .collect();
            let reward = env.reward(&state, &action);
            total += reward;
            let next = env.step(&state, &action).expect("clamped action in bounds");
            // An episode ends after the step taken from a success state (so
            // the success reward is collected exactly once) or when the step
            // leaves the playable area.
            let terminal = env.state_success(&state) || !env.state_valid(&next);
            transitions.push(Transition {
                state: state.clone(),
                action,
                reward,
                next_state: next.clone(),
                terminal,
            });
            state = next;
            if terminal {
                break;
            }
        }
        let segment = TrajectorySegment::new(env.task.clone(), transitions)
            .expect("horizon >= 1 guarantees nonempty");
        returns.push(total);
        successes.push(env.is_success(&segment));
        lengths.push(segment.len());
        trajectories.push(segment);
    }

    let mean_return = returns.iter().sum::<f64>() / returns.len() as f64;
    Ok((
        EvalResult {
            task: env.task.clone(),
            strategy: String::new(),
            seed: stream.master_seed,
            returns,
            successes,
            lengths,
            mean_return,
        },
        trajectories,
    ))
}

/// Expert and random anchor returns for score normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationAnchors {
    pub expert_return: f64,
    pub random_return: f64,
}

/// `100 * (R - random) / (expert - random)`.
pub fn normalized_return(r: f64, anchors: &NormalizationAnchors) -> Result<f64, EvalError> {
    let span = anchors.expert_return - anchors.random_return;
    if span == 0.0 || !span.is_finite() {
        return Err(EvalError::DegenerateAnchors);
    }
    Ok(100.0 * (r - anchors.random_return) / span)
}

/// Inter-quartile mean: drop `floor(N/4)` values from each end of the sorted
/// list and average the rest.
pub fn iqm(values: &[f64]) -> Result<f64, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptyValues);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let trim = sorted.len() / 4;
    let kept = &sorted[trim..sorted.len() - trim];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// Percentile bootstrap interval for an arbitrary statistic.
pub fn bootstrap_ci(
    values: &[f64],
    statistic: impl Fn(&[f64]) -> f64,
    resamples: usize,
    level: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), EvalError> {
    if values.len() < 2 {
        return Err(EvalError::TooFewValues {
            need: 2,
            got: values.len(),
        });
    }
    if resamples < 100 || !(0.0 < level && level < 1.0) {
        return Err(EvalError::BadBootstrapParams);
    }
    let mut stats = Vec::with_capacity(resamples);
    let mut sample = vec![0.0; values.len()];
    for _ in 0..resamples {
        for v in sample.iter_mut() {
            *v = values[rng.random_range(0..values.len())];
        }
        stats.push(statistic(&sample));
    }
    stats.sort_by(|a, b| a.partial_cmp(b).expect("finite statistic"));
    let tail = (1.0 - level) / 2.0;
    let lo_idx = ((resamples as f64 - 1.0) * tail).round() as usize;
    let hi_idx = ((resamples as f64 - 1.0) * (1.0 - tail)).round() as usize;
    Ok((stats[lo_idx], stats[hi_idx]))
}

/// Two-sided Welch t-test p-value for a difference in means.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(EvalError::TooFewValues {
            need: 2,
            got: a.len().min(b.len()),
        });
    }
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let var = |x: &[f64], m: f64| x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64;
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (var(a, ma), var(b, mb));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se_sq = va / na + vb / nb;
    if se_sq == 0.0 {
        // Degenerate: no variance in either sample.
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se_sq.sqrt();
    let dof = se_sq * se_sq / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).expect("dof positive");
    Ok(2.0 * (1.0 - dist.cdf(t.abs())))
}

/// One aggregated row of the comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub task: String,
    pub strategy: String,
    pub seeds: usize,
    /// IQM over per-seed mean normalized returns.
    pub iqm_norm_return: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub success_rate: f64,
    /// The per-seed mean normalized returns behind the aggregate.
    pub per_seed_norm_returns: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub strategy_a: String,
    pub strategy_b: String,
    pub p_value: f64,
}

/// Full comparison: rows ranked by IQM (best first) plus pairwise Welch
/// t-tests over per-seed normalized means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<StrategyRow>,
    pub pairwise: Vec<PairwiseTest>,
}

impl ComparisonReport {
    pub fn row(&self, strategy: &str) -> Option<&StrategyRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }
}

pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 2000;
pub const DEFAULT_CONFIDENCE_LEVEL: f64 = 0.95;

/// Aggregate per-strategy results: normalized per-seed means, IQM across
/// seeds, bootstrap CI of that IQM, pooled success rate, ranking, and
/// pairwise significance. All inputs must share one task; the bootstrap uses
/// a fixed internal stream so reports are reproducible.
pub fn compare_strategies(
    results: &BTreeMap<String, Vec<EvalResult>>,
    anchors: &NormalizationAnchors,
    resamples: usize,
    level: f64,
) -> Result<ComparisonReport, EvalError> {
    if results.len() < 2 || results.values().any(|v| v.len() < 2) {
        return Err(EvalError::TooFewStrategies);
    }
    let task = results
        .values()
        .next()
        .and_then(|v| v.first())
        .map(|r| r.task.clone())
        .ok_or(EvalError::TooFewStrategies)?;
    for list in results.values() {
        for r in list {
            if r.task != task {
                return Err(EvalError::MismatchedTasks(task, r.task.clone()));
            }
        }
    }

    let mut rows = Vec::new();
    let mut per_seed: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (strategy, list) in results {
        let norms: Vec<f64> = list
            .iter()
            .map(|r| normalized_return(r.mean_return, anchors))
            .collect::<Result<_, _>>()?;
        let iqm_value = iqm(&norms)?;
        let mut rng = RngStream::new(0).derive(0x5EED).rng();
        let (ci_low, ci_high) = bootstrap_ci(
            &norms,
            |v| iqm(v).expect("nonempty resample"),
            resamples,
            level,
            &mut rng,
        )?;
        let successes: usize = list
            .iter()
            .map(|r| r.successes.iter().filter(|s| **s).count())
            .sum();
        let episodes: usize = list.iter().map(|r| r.successes.len()).sum();
        rows.push(StrategyRow {
            task: task.clone(),
            strategy: strategy.clone(),
            seeds: list.len(),
            iqm_norm_return: iqm_value,
            ci_low,
            ci_high,
            success_rate: successes as f64 / episodes.max(1) as f64,
            per_seed_norm_returns: norms.clone(),
        });
        per_seed.insert(strategy.as_str(), norms);
    }
    rows.sort_by(|a, b| b.iqm_norm_return.partial_cmp(&a.iqm_norm_return).expect("finite iqm"));

    let strategies: Vec<&str> = per_seed.keys().copied().collect();
    let mut pairwise = Vec::new();
    for (i, sa) in strategies.iter().enumerate() {
        for sb in strategies.iter().skip(i + 1) {
            pairwise.push(PairwiseTest {
                strategy_a: sa.to_string(),
                strategy_b: sb.to_string(),
                p_value: welch_t_test(&per_seed[sa], &per_seed[sb])?,
            });
        }
    }
    Ok(ComparisonReport { rows, pairwise })
}
