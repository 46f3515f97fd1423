//! Transform-parameter sampling: the uniform-random baseline and the guided
//! rules, plus augmented-dataset construction.
//!
//! Guided rules anchor each source window somewhere useful (a random open
//! cell, the goal spot, the goal disc) and pick rotation angles so the
//! transformed segment depicts task progress, with truncated Gaussian noise
//! injected into the alignment. Invalid placements are rejected and retried;
//! nothing is ever clipped into validity.
//!
//! The guided maze rules draw their alignment noise once per source window
//! and spend the retry budget on anchor placements. Redrawing noise on every
//! rejection would couple the emitted noise distribution to placement
//! geometry; keeping it fixed preserves the truncated Gaussian exactly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::daf::{compose, AugmentedSegment, DafError, TransformParams};
use crate::data::{
    segment_windows, wrap_angle, DataError, DataSource, Dataset, DatasetMeta, EpisodeProvenance,
    RngStream, TrajectorySegment, Vec2,
};
use crate::env::{EnvModel, MazeModel, TaskModel};

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("rejection budget exhausted")]
    RejectionBudget,
    #[error("persistent rejection failure for rule '{rule}'")]
    PersistentRejection { rule: String },
    #[error("rule '{rule}' does not apply to task '{task}'")]
    RuleTask { rule: String, task: String },
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Daf(#[from] DafError),
}

/// Which sampling rule drives parameter draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    RandomDa,
    GuidedMaze,
    GuidedAntmazeStyle,
    GuidedParking,
    GuidedSoccer,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::RandomDa => "random",
            RuleKind::GuidedMaze => "guided-maze",
            RuleKind::GuidedAntmazeStyle => "guided-antmaze",
            RuleKind::GuidedParking => "guided-parking",
            RuleKind::GuidedSoccer => "guided-soccer",
        }
    }

    pub fn from_name(name: &str) -> Result<RuleKind, SampleError> {
        Ok(match name {
            "random" => RuleKind::RandomDa,
            "guided-maze" => RuleKind::GuidedMaze,
            "guided-antmaze" => RuleKind::GuidedAntmazeStyle,
            "guided-parking" => RuleKind::GuidedParking,
            "guided-soccer" => RuleKind::GuidedSoccer,
            other => return Err(SampleError::UnknownRule(other.to_string())),
        })
    }
}

/// Declarative description of how transform parameters are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRule {
    pub kind: RuleKind,
    /// Std-dev of the angular alignment noise, radians; truncated at two
    /// sigma.
    pub angular_sigma: f64,
    /// Std-dev of the positional anchor noise, task units; truncated at two
    /// sigma radially.
    pub positional_sigma: f64,
    /// Source window length; clamped to the episode length.
    pub segment_len: usize,
    /// Placement retries per source window before giving up on it.
    pub max_retries: usize,
}

/// Angular acceptance threshold of the translate-only maze rule, radians.
pub const ANTMAZE_ALIGN_THRESHOLD: f64 = 0.52;

/// Rotation trials for the in-bounds search of the soccer rule.
const SOCCER_ROTATION_TRIALS: usize = 200;

/// Wall clearance required of guided maze placements. Collision response is
/// not rotation-equivariant, so guided rules keep augmented paths off walls.
pub const GUIDED_MAZE_CLEARANCE: f64 = 0.1;

// Anchor positions keep this margin inside their cell.
const ANCHOR_CELL_MARGIN: f64 = 0.1;

impl AugmentationRule {
    /// The task's guided rule with its default noise and window settings.
    pub fn guided_for(env: &EnvModel) -> AugmentationRule {
        match &env.model {
            TaskModel::Maze(_) => AugmentationRule {
                kind: RuleKind::GuidedMaze,
                angular_sigma: 0.2,
                positional_sigma: 0.1,
                segment_len: 16,
                max_retries: 100,
            },
            // Parking noise must stay inside the success tolerances after
            // two-sigma truncation (0.2 < 0.25 positional, 0.2 < 0.26
            // heading), so its angular sigma is tighter than the maze rule's.
            TaskModel::Parking(_) => AugmentationRule {
                kind: RuleKind::GuidedParking,
                angular_sigma: 0.1,
                positional_sigma: 0.1,
                segment_len: env.mdp.horizon,
                max_retries: 100,
            },
            TaskModel::Soccer(_) => AugmentationRule {
                kind: RuleKind::GuidedSoccer,
                angular_sigma: 0.2,
                positional_sigma: 0.1,
                segment_len: env.mdp.horizon,
                max_retries: 100,
            },
        }
    }

    /// The uniform-random baseline for the task.
    pub fn random_for(env: &EnvModel) -> AugmentationRule {
        let guided = Self::guided_for(env);
        AugmentationRule {
            kind: RuleKind::RandomDa,
            ..guided
        }
    }

    pub fn applicable(&self, env: &EnvModel) -> bool {
        match self.kind {
            RuleKind::RandomDa => true,
            RuleKind::GuidedMaze | RuleKind::GuidedAntmazeStyle => env.maze().is_some(),
            RuleKind::GuidedParking => env.parking().is_some(),
            RuleKind::GuidedSoccer => env.soccer().is_some(),
        }
    }

    fn check_applicable(&self, env: &EnvModel) -> Result<(), SampleError> {
        if self.applicable(env) {
            Ok(())
        } else {
            Err(SampleError::RuleTask {
                rule: self.kind.name().to_string(),
                task: env.task.clone(),
            })
        }
    }
}

fn trunc_normal(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated nonnegative");
    loop {
        let x = normal.sample(rng);
        if x.abs() <= 2.0 * sigma {
            return x;
        }
    }
}

// Isotropic 2D Gaussian truncated at two sigma radially, so the offset norm
// never exceeds 2*sigma.
fn trunc_normal_2d(rng: &mut ChaCha8Rng, sigma: f64) -> Vec2 {
    if sigma <= 0.0 {
        return Vec2::ZERO;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated nonnegative");
    loop {
        let v = Vec2::new(normal.sample(rng), normal.sample(rng));
        if v.norm() <= 2.0 * sigma {
            return v;
        }
    }
}

fn first_agent_pos(seg: &TrajectorySegment, env: &EnvModel) -> Vec2 {
    let idx = env.layout().agent_pos;
    Vec2::new(seg.first().state[idx[0]], seg.first().state[idx[1]])
}

fn final_agent_pos(seg: &TrajectorySegment, env: &EnvModel) -> Vec2 {
    let idx = env.layout().agent_pos;
    Vec2::new(seg.last().next_state[idx[0]], seg.last().next_state[idx[1]])
}

/// Net agent displacement over the window: final next state minus first
/// state.
pub fn net_displacement(seg: &TrajectorySegment, env: &EnvModel) -> Vec2 {
    final_agent_pos(seg, env) - first_agent_pos(seg, env)
}

fn final_ball_pos(seg: &TrajectorySegment, env: &EnvModel) -> Vec2 {
    let idx = env.layout().object_pos.expect("task with an object");
    Vec2::new(seg.last().next_state[idx[0]], seg.last().next_state[idx[1]])
}

// Anchor cells are open cells that are not the goal (the direction field is
// zero there, so there is nothing to align to).
fn draw_maze_anchor(maze: &MazeModel, rng: &mut ChaCha8Rng) -> ((usize, usize), Vec2) {
    let cells = &maze.spec.start_cells;
    let cell = cells[rng.random_range(0..cells.len())];
    let pos = Vec2::new(
        cell.0 as f64 + rng.random_range(ANCHOR_CELL_MARGIN..1.0 - ANCHOR_CELL_MARGIN),
        cell.1 as f64 + rng.random_range(ANCHOR_CELL_MARGIN..1.0 - ANCHOR_CELL_MARGIN),
    );
    (cell, pos)
}

fn maze_clearance_ok(maze: &MazeModel, seg: &TrajectorySegment, env: &EnvModel) -> bool {
    let idx = env.layout().agent_pos;
    let ok = |s: &[f64]| maze.spec.clearance_ok(Vec2::new(s[idx[0]], s[idx[1]]), GUIDED_MAZE_CLEARANCE);
    seg.transitions.iter().all(|t| ok(&t.state)) && ok(&seg.last().next_state)
}

/// Uniform-random baseline: placement uniform over the bounding box,
/// rotation uniform over the circle, reflection with probability 0.5 where
/// the task admits it, goal uniform over spots. Retries draw fresh
/// parameters.
pub fn sample_random(
    seg: &TrajectorySegment,
    env: &EnvModel,
    rule: &AugmentationRule,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedSegment, SampleError> {
    let (lo, hi) = env.bounding_box();
    for _ in 0..rule.max_retries {
        let target = Vec2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        let mut params = Vec::new();
        let anchor = match &env.model {
            TaskModel::Maze(_) | TaskModel::Parking(_) => first_agent_pos(seg, env),
            TaskModel::Soccer(_) => final_ball_pos(seg, env),
        };
        if let TaskModel::Parking(p) = &env.model {
            let (spot, heading) = p.spots[rng.random_range(0..p.spots.len())];
            params.push(TransformParams::relabel_goal(vec![spot.x, spot.y, heading]));
        }
        params.push(TransformParams::translate(target - anchor));
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        params.push(TransformParams::rotate(angle, target));
        if let TaskModel::Soccer(s) = &env.model {
            if rng.random::<bool>() {
                let mid = Vec2::new(0.0, (s.field_min.y + s.field_max.y) / 2.0);
                params.push(TransformParams::reflect(mid, Vec2::new(1.0, 0.0)));
            }
        }
        match compose(seg, &params, env) {
            Ok(aug) => return Ok(aug),
            Err(DafError::InvalidPlacement) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SampleError::RejectionBudget)
}

/// Guided maze rule: translate the window's first state to a uniformly drawn
/// open-cell position, then rotate about that anchor so the net displacement
/// direction equals the shortest-path direction at the anchor cell plus
/// truncated Gaussian noise. Placements failing validity or wall clearance
/// are rejected.
pub fn sample_guided_maze(
    seg: &TrajectorySegment,
    env: &EnvModel,
    rule: &AugmentationRule,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedSegment, SampleError> {
    rule.check_applicable(env)?;
    let maze = env.maze().expect("checked applicable");
    let disp = net_displacement(seg, env);
    let noise = trunc_normal(rng, rule.angular_sigma);
    for _ in 0..rule.max_retries {
        let (cell, pos) = draw_maze_anchor(maze, rng);
        let delta = pos - first_agent_pos(seg, env);
        let target_angle = maze.spec.field.direction_at(cell).angle() + noise;
        let rot = if disp.norm() < 1e-9 {
            0.0
        } else {
            wrap_angle(target_angle - disp.angle())
        };
        let params = [
            TransformParams::translate(delta),
            TransformParams::rotate(rot, pos),
        ];
        match compose(seg, &params, env) {
            Ok(aug) if maze_clearance_ok(maze, &aug.segment, env) => return Ok(aug),
            Ok(_) | Err(DafError::InvalidPlacement) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SampleError::RejectionBudget)
}

/// Translate-only maze rule: anchors are accepted only where the window's
/// original displacement direction is within [`ANTMAZE_ALIGN_THRESHOLD`] of
/// the shortest-path direction; no rotation is applied.
pub fn sample_guided_antmaze_style(
    seg: &TrajectorySegment,
    env: &EnvModel,
    rule: &AugmentationRule,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedSegment, SampleError> {
    rule.check_applicable(env)?;
    let maze = env.maze().expect("checked applicable");
    let disp = net_displacement(seg, env);
    if disp.norm() < 1e-9 {
        return Err(SampleError::RejectionBudget);
    }
    for _ in 0..rule.max_retries {
        let (cell, pos) = draw_maze_anchor(maze, rng);
        let field_dir = maze.spec.field.direction_at(cell);
        if wrap_angle(disp.angle() - field_dir.angle()).abs() > ANTMAZE_ALIGN_THRESHOLD {
            continue;
        }
        let delta = pos - first_agent_pos(seg, env);
        match compose(seg, &[TransformParams::translate(delta)], env) {
            Ok(aug) if maze_clearance_ok(maze, &aug.segment, env) => return Ok(aug),
            Ok(_) | Err(DafError::InvalidPlacement) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SampleError::RejectionBudget)
}

/// Guided parking rule: relabel the goal to a uniformly drawn spot, translate
/// the final car position onto the spot center plus truncated positional
/// noise, and rotate about that final position so the final heading matches
/// the spot heading plus truncated angular noise.
pub fn sample_guided_parking(
    seg: &TrajectorySegment,
    env: &EnvModel,
    rule: &AugmentationRule,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedSegment, SampleError> {
    rule.check_applicable(env)?;
    let parking = env.parking().expect("checked applicable");
    let heading_idx = env.layout().agent_heading.expect("car has a heading");
    for _ in 0..rule.max_retries {
        let (spot, spot_heading) = parking.spots[rng.random_range(0..parking.spots.len())];
        let pos_noise = trunc_normal_2d(rng, rule.positional_sigma);
        let ang_noise = trunc_normal(rng, rule.angular_sigma);
        let final_pos = final_agent_pos(seg, env);
        let final_heading = seg.last().next_state[heading_idx];
        let anchored = spot + pos_noise;
        let params = [
            TransformParams::relabel_goal(vec![spot.x, spot.y, spot_heading]),
            TransformParams::translate(anchored - final_pos),
            TransformParams::rotate(spot_heading + ang_noise - final_heading, anchored),
        ];
        match compose(seg, &params, env) {
            Ok(aug) => return Ok(aug),
            Err(DafError::InvalidPlacement) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SampleError::RejectionBudget)
}

/// Guided soccer rule: translate the final ball position onto the goal
/// center, rotate about it by an angle drawn uniformly from the in-bounds
/// subset (found by rejection), then reflect across the field's long axis
/// with probability 0.5.
pub fn sample_guided_soccer(
    seg: &TrajectorySegment,
    env: &EnvModel,
    rule: &AugmentationRule,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedSegment, SampleError> {
    rule.check_applicable(env)?;
    let soccer = env.soccer().expect("checked applicable");
    let delta = soccer.goal_center - final_ball_pos(seg, env);
    let reflect = rng.random::<bool>();
    let axis_point = Vec2::new(0.0, (soccer.field_min.y + soccer.field_max.y) / 2.0);
    for _ in 0..SOCCER_ROTATION_TRIALS {
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut params = vec![
            TransformParams::translate(delta),
            TransformParams::rotate(angle, soccer.goal_center),
        ];
        if reflect {
            params.push(TransformParams::reflect(axis_point, Vec2::new(1.0, 0.0)));
        }
        match compose(seg, &params, env) {
            Ok(aug) => return Ok(aug),
            Err(DafError::InvalidPlacement) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SampleError::RejectionBudget)
}

/// Dispatch on the rule kind.
pub fn sample_with_rule(
    seg: &TrajectorySegment,
    env: &EnvModel,
    rule: &AugmentationRule,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedSegment, SampleError> {
    match rule.kind {
        RuleKind::RandomDa => sample_random(seg, env, rule, rng),
        RuleKind::GuidedMaze => sample_guided_maze(seg, env, rule, rng),
        RuleKind::GuidedAntmazeStyle => sample_guided_antmaze_style(seg, env, rule, rng),
        RuleKind::GuidedParking => sample_guided_parking(seg, env, rule, rng),
        RuleKind::GuidedSoccer => sample_guided_soccer(seg, env, rule, rng),
    }
}

/// A full augmentation run: source demonstrations, rule, target count, seed.
#[derive(Debug, Clone)]
pub struct AugmentationJob {
    pub source: Dataset,
    pub rule: AugmentationRule,
    /// Target number of augmented transitions; generation stops after the
    /// episode that crosses this count.
    pub target_transitions: usize,
    pub master_seed: u64,
}

/// Counters reported alongside the augmented dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentStats {
    pub emitted_episodes: usize,
    pub augmented_transitions: usize,
    /// Source windows abandoned after exhausting the placement budget.
    pub window_failures: usize,
}

/// Built dataset plus per-episode provenance (demos carry none).
#[derive(Debug, Clone)]
pub struct AugmentOutput {
    pub dataset: Dataset,
    pub provenance: Vec<EpisodeProvenance>,
    pub stats: AugmentStats,
}

const AUGMENT_STREAM_TAG: u64 = 0x41;
// Windows abandoned per emission before declaring the rule stuck.
const MAX_WINDOW_ATTEMPTS: usize = 200;

/// Build the augmented dataset: the original demonstrations verbatim,
/// followed by augmented episodes until at least `target_transitions`
/// augmented transitions exist. Deterministic given the master seed: every
/// (emission, attempt) pair gets its own derived stream, so the output is
/// identical regardless of scheduling.
pub fn build_augmented_dataset(job: &AugmentationJob, env: &EnvModel) -> Result<AugmentOutput, SampleError> {
    let mut episodes = job.source.episodes.clone();
    let mut provenance: Vec<EpisodeProvenance> = vec![None; episodes.len()];
    let mut stats = AugmentStats::default();
    let base = RngStream::new(job.master_seed).derive(AUGMENT_STREAM_TAG);

    let mut emission = 0u64;
    while stats.augmented_transitions < job.target_transitions {
        let mut emitted = None;
        for attempt in 0..MAX_WINDOW_ATTEMPTS {
            let mut rng = base.derive(emission).derive(attempt as u64).rng();
            let (window, src) = segment_windows(&job.source, job.rule.segment_len, &mut rng)?;
            match sample_with_rule(&window, env, &job.rule, &mut rng) {
                Ok(aug) => {
                    emitted = Some(aug.with_source(src));
                    break;
                }
                Err(SampleError::RejectionBudget) => {
                    stats.window_failures += 1;
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        let aug = emitted.ok_or_else(|| SampleError::PersistentRejection {
            rule: job.rule.kind.name().to_string(),
        })?;
        stats.emitted_episodes += 1;
        stats.augmented_transitions += aug.segment.len();
        let src = aug.source.expect("set above");
        provenance.push(Some(json!({
            "episode": src.episode,
            "start": src.start,
            "transforms": aug.transforms,
        })));
        episodes.push(aug.segment);
        emission += 1;
    }

    let meta = DatasetMeta {
        source: DataSource::Augmented,
        seed: Some(job.master_seed),
        rule: Some(job.rule.kind.name().to_string()),
        demo_transitions: Some(job.source.transition_count()),
        augmented_transitions: Some(stats.augmented_transitions),
    };
    let dataset = Dataset::new(job.source.task.clone(), episodes, meta)?;
    Ok(AugmentOutput {
        dataset,
        provenance,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{chain_check, Transition};

    // Straight point-mass segment generated by the real dynamics.
    fn maze_demo_segment(env: &EnvModel, p0: Vec2, dir: Vec2, steps: usize) -> TrajectorySegment {
        let mut s = vec![p0.x, p0.y, 0.0, 0.0];
        let mut transitions = Vec::new();
        for _ in 0..steps {
            let a = vec![dir.x, dir.y];
            let next = env.step(&s, &a).unwrap();
            transitions.push(Transition {
                state: s.clone(),
                action: a.clone(),
                reward: env.reward(&s, &a),
                next_state: next.clone(),
                terminal: false,
            });
            s = next;
        }
        TrajectorySegment::new(env.task.clone(), transitions).unwrap()
    }

    fn arena_env() -> EnvModel {
        EnvModel::for_task("maze-arena").unwrap()
    }

    fn alignment_angle(aug: &AugmentedSegment, env: &EnvModel) -> f64 {
        let maze = env.maze().unwrap();
        let first = Vec2::new(aug.segment.first().state[0], aug.segment.first().state[1]);
        let cell = maze.spec.cell_of(first);
        let field = maze.spec.field.direction_at((cell.0 as usize, cell.1 as usize));
        wrap_angle(net_displacement(&aug.segment, env).angle() - field.angle())
    }

    #[test]
    fn guided_maze_zero_noise_aligns_exactly() {
        let env = arena_env();
        let seg = maze_demo_segment(&env, Vec2::new(5.0, 5.0), Vec2::new(0.7, 0.4), 8);
        let mut rule = AugmentationRule::guided_for(&env);
        rule.angular_sigma = 0.0;
        let mut rng = RngStream::new(12).rng();
        for _ in 0..200 {
            let aug = sample_guided_maze(&seg, &env, &rule, &mut rng).unwrap();
            assert!(alignment_angle(&aug, &env).abs() < 1e-9);
            assert!(chain_check(&aug.segment));
            assert!(env.is_valid(&aug.segment));
        }
    }

    #[test]
    fn guided_maze_noise_stays_in_truncation_band() {
        let env = arena_env();
        let seg = maze_demo_segment(&env, Vec2::new(5.0, 5.0), Vec2::new(0.7, 0.4), 8);
        let rule = AugmentationRule::guided_for(&env);
        let mut rng = RngStream::new(13).rng();
        let n = 2000;
        let mut sum = 0.0;
        for _ in 0..n {
            let aug = sample_guided_maze(&seg, &env, &rule, &mut rng).unwrap();
            let angle = alignment_angle(&aug, &env);
            assert!(angle.abs() <= 2.0 * rule.angular_sigma + 1e-9);
            sum += angle;
        }
        let mean = sum / n as f64;
        assert!(mean.abs() < 0.02, "alignment mean {mean}");
    }

    #[test]
    fn guided_maze_anchors_cover_open_cells() {
        let env = EnvModel::for_task("maze-umaze").unwrap();
        let maze = env.maze().unwrap();
        let seg = maze_demo_segment(&env, Vec2::new(1.5, 3.2), Vec2::new(0.6, 0.0), 6);
        let rule = AugmentationRule::guided_for(&env);
        let mut rng = RngStream::new(14).rng();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..3000 {
            if let Ok(aug) = sample_guided_maze(&seg, &env, &rule, &mut rng) {
                let first = Vec2::new(aug.segment.first().state[0], aug.segment.first().state[1]);
                seen.insert(maze.spec.cell_of(first));
            }
        }
        for &(x, y) in &maze.spec.start_cells {
            assert!(
                seen.contains(&(x as i64, y as i64)),
                "anchor cell ({x},{y}) never used"
            );
        }
    }

    #[test]
    fn antmaze_rule_acceptance_region_matches_enumeration() {
        let env = EnvModel::for_task("maze-medium").unwrap();
        let maze = env.maze().unwrap();
        // Eastward segment.
        let seg = maze_demo_segment(&env, Vec2::new(1.3, 5.5), Vec2::new(1.0, 0.0), 5);
        let disp = net_displacement(&seg, &env);
        // Brute-force oracle over all anchor cells.
        let accepted_oracle: std::collections::BTreeSet<(usize, usize)> = maze
            .spec
            .start_cells
            .iter()
            .copied()
            .filter(|&c| {
                let dir = maze.spec.field.direction_at(c);
                wrap_angle(disp.angle() - dir.angle()).abs() <= ANTMAZE_ALIGN_THRESHOLD
            })
            .collect();
        assert!(!accepted_oracle.is_empty());

        let rule = AugmentationRule {
            kind: RuleKind::GuidedAntmazeStyle,
            ..AugmentationRule::guided_for(&env)
        };
        let mut rng = RngStream::new(15).rng();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..4000 {
            if let Ok(aug) = sample_guided_antmaze_style(&seg, &env, &rule, &mut rng) {
                let first = Vec2::new(aug.segment.first().state[0], aug.segment.first().state[1]);
                let (x, y) = maze.spec.cell_of(first);
                seen.insert((x as usize, y as usize));
                // No rotation applied: displacement unchanged.
                let d = net_displacement(&aug.segment, &env);
                assert!((d.x - disp.x).abs() < 1e-12 && (d.y - disp.y).abs() < 1e-12);
            }
        }
        assert!(seen.is_subset(&accepted_oracle));
        // Cells that are both aligned and physically placeable should be hit;
        // every aligned cell in this layout has room for the short segment.
        assert_eq!(seen, accepted_oracle);
    }

    #[test]
    fn antmaze_rule_rejects_misaligned_corridor() {
        let env = arena_env();
        // Arena field points +x almost everywhere; a segment moving -x can
        // only anchor in the goal column, whose field points along y.
        let seg = maze_demo_segment(&env, Vec2::new(20.0, 5.0), Vec2::new(-1.0, 0.0), 5);
        let rule = AugmentationRule {
            kind: RuleKind::GuidedAntmazeStyle,
            ..AugmentationRule::guided_for(&env)
        };
        let mut rng = RngStream::new(16).rng();
        let err = sample_guided_antmaze_style(&seg, &env, &rule, &mut rng);
        assert!(matches!(err, Err(SampleError::RejectionBudget)));
    }

    #[test]
    fn random_da_outputs_are_valid_and_isotropic() {
        let env = arena_env();
        let seg = maze_demo_segment(&env, Vec2::new(5.0, 5.0), Vec2::new(0.8, 0.0), 8);
        let rule = AugmentationRule::random_for(&env);
        let mut rng = RngStream::new(17).rng();
        let n = 10_000;
        let mut resultant = Vec2::ZERO;
        for _ in 0..n {
            let aug = sample_random(&seg, &env, &rule, &mut rng).unwrap();
            assert!(env.is_valid(&aug.segment));
            resultant = resultant + net_displacement(&aug.segment, &env).normalized();
        }
        let mean_resultant = resultant.norm() / n as f64;
        assert!(mean_resultant < 0.05, "mean resultant length {mean_resultant}");
    }

    #[test]
    fn guided_vs_random_anisotropy_contrast() {
        let env = arena_env();
        let seg = maze_demo_segment(&env, Vec2::new(5.0, 5.0), Vec2::new(0.8, 0.0), 8);
        let rule = AugmentationRule::guided_for(&env);
        let mut rng = RngStream::new(18).rng();
        let n = 10_000;
        let mut resultant = Vec2::ZERO;
        for _ in 0..n {
            let aug = sample_guided_maze(&seg, &env, &rule, &mut rng).unwrap();
            resultant = resultant + net_displacement(&aug.segment, &env).normalized();
        }
        let mean_resultant = resultant.norm() / n as f64;
        assert!(mean_resultant > 0.9, "mean resultant length {mean_resultant}");
    }

    fn parking_demo(env: &EnvModel) -> TrajectorySegment {
        // Minimal plausible parking episode: drive up toward the drawn spot
        // and stop there, built from the real dynamics.
        let mut rng = RngStream::new(19).rng();
        let mut s = env.sample_initial(&mut rng);
        // Aim the episode at its own goal spot so it ends parked.
        let mut transitions = Vec::new();
        for step in 0..80 {
            let spot = Vec2::new(s[4], s[5]);
            let pos = Vec2::new(s[0], s[1]);
            let dist = (spot - pos).norm();
            let accel: f64 = if dist > 1.5 { 0.6 } else { -0.4 };
            let bearing = (spot - pos).angle();
            let steer = (3.0 * wrap_angle(bearing - s[2])).clamp(-1.0, 1.0);
            let a = vec![accel.clamp(-1.0, 1.0), steer];
            let next = env.step(&s, &a).unwrap();
            let terminal = env.is_terminal(&next) || step == 79;
            transitions.push(Transition {
                state: s.clone(),
                action: a.clone(),
                reward: env.reward(&s, &a),
                next_state: next.clone(),
                terminal,
            });
            s = next;
            if terminal {
                break;
            }
        }
        TrajectorySegment::new("parking", transitions).unwrap()
    }

    #[test]
    fn guided_parking_outputs_succeed_and_cover_spots() {
        let env = EnvModel::for_task("parking").unwrap();
        let seg = parking_demo(&env);
        let rule = AugmentationRule::guided_for(&env);
        let mut rng = RngStream::new(20).rng();
        let n = 1000;
        let mut successes = 0;
        let mut spot_counts = vec![0usize; env.parking().unwrap().spots.len()];
        for _ in 0..n {
            let aug = sample_guided_parking(&seg, &env, &rule, &mut rng).unwrap();
            if env.is_success(&aug.segment) {
                successes += 1;
            }
            let goal = Vec2::new(aug.segment.first().state[4], aug.segment.first().state[5]);
            let i = env
                .parking()
                .unwrap()
                .spots
                .iter()
                .position(|(p, _)| (*p - goal).norm() < 1e-9)
                .unwrap();
            spot_counts[i] += 1;
        }
        assert!(successes * 100 >= n * 99, "successes {successes}/{n}");
        let expect = n as f64 / spot_counts.len() as f64;
        for &c in &spot_counts {
            assert!(
                (c as f64 - expect).abs() < 5.0 * expect.sqrt(),
                "spot counts {spot_counts:?}"
            );
        }
    }

    #[test]
    fn guided_parking_zero_noise_hits_exact_pose() {
        let env = EnvModel::for_task("parking").unwrap();
        let seg = parking_demo(&env);
        let mut rule = AugmentationRule::guided_for(&env);
        rule.angular_sigma = 0.0;
        rule.positional_sigma = 0.0;
        let mut rng = RngStream::new(21).rng();
        let aug = sample_guided_parking(&seg, &env, &rule, &mut rng).unwrap();
        let last = &aug.segment.last().next_state;
        let spot = Vec2::new(last[4], last[5]);
        assert!((Vec2::new(last[0], last[1]) - spot).norm() < 1e-9);
        assert!(wrap_angle(last[2] - last[6]).abs() < 1e-9);
    }

    fn soccer_demo(env: &EnvModel) -> TrajectorySegment {
        // Agent walks the ball a few units; built from the real dynamics.
        let mut s = vec![6.0, 5.0, 0.0, 6.6, 5.0];
        let mut transitions = Vec::new();
        for _ in 0..30 {
            let a = vec![1.0, 0.0];
            let next = env.step(&s, &a).unwrap();
            transitions.push(Transition {
                state: s.clone(),
                action: a.clone(),
                reward: env.reward(&s, &a),
                next_state: next.clone(),
                terminal: false,
            });
            s = next;
        }
        TrajectorySegment::new("soccer", transitions).unwrap()
    }

    #[test]
    fn guided_soccer_anchors_ball_at_goal_and_reflects_half_the_time() {
        let env = EnvModel::for_task("soccer").unwrap();
        let soccer = env.soccer().unwrap();
        let seg = soccer_demo(&env);
        let rule = AugmentationRule::guided_for(&env);
        let mut rng = RngStream::new(22).rng();
        let n = 10_000;
        let mut reflections = 0;
        for _ in 0..n {
            let aug = sample_guided_soccer(&seg, &env, &rule, &mut rng).unwrap();
            assert!(env.is_valid(&aug.segment));
            let last = &aug.segment.last().next_state;
            let ball = Vec2::new(last[3], last[4]);
            assert!((ball - soccer.goal_center).norm() < 1e-9);
            if aug
                .transforms
                .iter()
                .any(|t| matches!(t, TransformParams::Reflect { .. }))
            {
                reflections += 1;
            }
        }
        let rate = reflections as f64 / n as f64;
        assert!((rate - 0.5).abs() <= 0.02, "reflection rate {rate}");
    }

    #[test]
    fn build_with_zero_target_returns_demos_only() {
        let env = EnvModel::for_task("maze-umaze").unwrap();
        let seg = maze_demo_segment(&env, Vec2::new(1.5, 3.2), Vec2::new(0.6, 0.0), 10);
        let source = Dataset::new("maze-umaze", vec![seg], DatasetMeta::demo()).unwrap();
        let job = AugmentationJob {
            source: source.clone(),
            rule: AugmentationRule::guided_for(&env),
            target_transitions: 0,
            master_seed: 1,
        };
        let out = build_augmented_dataset(&job, &env).unwrap();
        assert_eq!(out.dataset.episodes, source.episodes);
        assert_eq!(out.stats.augmented_transitions, 0);
    }

    #[test]
    fn build_stops_after_crossing_target() {
        let env = EnvModel::for_task("maze-umaze").unwrap();
        let seg = maze_demo_segment(&env, Vec2::new(1.5, 3.2), Vec2::new(0.6, 0.0), 10);
        let source = Dataset::new("maze-umaze", vec![seg], DatasetMeta::demo()).unwrap();
        let demo_count = source.transition_count();
        let job = AugmentationJob {
            source,
            rule: AugmentationRule::guided_for(&env),
            target_transitions: 500,
            master_seed: 2,
        };
        let out = build_augmented_dataset(&job, &env).unwrap();
        let total = out.dataset.transition_count();
        assert!(total >= 500 + demo_count);
        assert!(total < 500 + demo_count + job.rule.segment_len);
        // Demonstrations are contained verbatim, in order, at the front.
        assert_eq!(out.dataset.episodes[0], job.source.episodes[0]);
    }

    #[test]
    fn build_is_deterministic_and_seed_sensitive() {
        let env = EnvModel::for_task("maze-umaze").unwrap();
        let seg = maze_demo_segment(&env, Vec2::new(1.5, 3.2), Vec2::new(0.6, 0.0), 10);
        let source = Dataset::new("maze-umaze", vec![seg], DatasetMeta::demo()).unwrap();
        let job = |seed| AugmentationJob {
            source: source.clone(),
            rule: AugmentationRule::guided_for(&env),
            target_transitions: 300,
            master_seed: seed,
        };
        let a = build_augmented_dataset(&job(7), &env).unwrap();
        let b = build_augmented_dataset(&job(7), &env).unwrap();
        assert_eq!(a.dataset, b.dataset);
        let c = build_augmented_dataset(&job(8), &env).unwrap();
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn rule_task_mismatch_is_an_error() {
        let env = EnvModel::for_task("parking").unwrap();
        let seg = parking_demo(&env);
        let rule = AugmentationRule {
            kind: RuleKind::GuidedMaze,
            angular_sigma: 0.2,
            positional_sigma: 0.1,
            segment_len: 16,
            max_retries: 10,
        };
        let mut rng = RngStream::new(23).rng();
        assert!(matches!(
            sample_guided_maze(&seg, &env, &rule, &mut rng),
            Err(SampleError::RuleTask { .. })
        ));
    }

    #[test]
    fn reward_exactness_holds_for_all_rules() {
        // Every emitted transition's reward equals the task model's reward
        // recomputed from scratch, bitwise.
        let cases: Vec<(EnvModel, TrajectorySegment, AugmentationRule)> = {
            let maze = EnvModel::for_task("maze-umaze").unwrap();
            let maze_seg = maze_demo_segment(&maze, Vec2::new(1.5, 3.2), Vec2::new(0.6, 0.0), 10);
            let parking = EnvModel::for_task("parking").unwrap();
            let parking_seg = parking_demo(&parking);
            let soccer = EnvModel::for_task("soccer").unwrap();
            let soccer_seg = soccer_demo(&soccer);
            vec![
                (maze.clone(), maze_seg.clone(), AugmentationRule::guided_for(&maze)),
                (maze.clone(), maze_seg, AugmentationRule::random_for(&maze)),
                (
                    parking.clone(),
                    parking_seg.clone(),
                    AugmentationRule::guided_for(&parking),
                ),
                (parking.clone(), parking_seg, AugmentationRule::random_for(&parking)),
                (
                    soccer.clone(),
                    soccer_seg.clone(),
                    AugmentationRule::guided_for(&soccer),
                ),
                (soccer.clone(), soccer_seg, AugmentationRule::random_for(&soccer)),
            ]
        };
        for (env, seg, rule) in cases {
            let mut rng = RngStream::new(24).rng();
            let mut emitted = 0;
            for _ in 0..200 {
                if let Ok(aug) = sample_with_rule(&seg, &env, &rule, &mut rng) {
                    emitted += 1;
                    for t in &aug.segment.transitions {
                        assert_eq!(t.reward, env.reward(&t.state, &t.action));
                    }
                    assert!(chain_check(&aug.segment));
                }
            }
            assert!(emitted > 100, "rule {} rarely emits", rule.kind.name());
        }
    }
}
