//! Segment transforms: translate, rotate, reflect, and goal relabeling.
//!
//! Each transform is a deterministic, parameterized map over a whole
//! trajectory segment; all randomness lives in the sampling module, which
//! supplies the parameters. Rewards are never transformed: every emitted
//! segment gets its rewards recomputed from the task model, transition by
//! transition, which is the only scheme that stays correct for both sparse
//! and dense rewards. Validity failures surface as errors for the sampler to
//! retry; silent clipping would break dynamics consistency.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{wrap_angle, SourceWindow, TrajectorySegment, Vec2};
use crate::env::{EnvModel, StateLayout};

#[derive(Debug, Error)]
pub enum DafError {
    #[error("invalid placement")]
    InvalidPlacement,
    #[error("no goal component")]
    NoGoalComponent,
    #[error("empty transform list")]
    EmptyCompose,
}

/// Realized transform parameters. Angles are wrapped to `(-pi, pi]` and the
/// reflection axis direction is normalized at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TransformParams {
    Translate { delta: Vec2 },
    Rotate { angle: f64, pivot: Vec2 },
    Reflect { point: Vec2, dir: Vec2 },
    RelabelGoal { goal: Vec<f64> },
}

impl TransformParams {
    pub fn translate(delta: Vec2) -> Self {
        TransformParams::Translate { delta }
    }

    pub fn rotate(angle: f64, pivot: Vec2) -> Self {
        TransformParams::Rotate {
            angle: wrap_angle(angle),
            pivot,
        }
    }

    pub fn reflect(point: Vec2, dir: Vec2) -> Self {
        TransformParams::Reflect {
            point,
            dir: dir.normalized(),
        }
    }

    pub fn relabel_goal(goal: Vec<f64>) -> Self {
        TransformParams::RelabelGoal { goal }
    }
}

/// A transformed segment with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSegment {
    pub segment: TrajectorySegment,
    pub transforms: Vec<TransformParams>,
    pub source: Option<SourceWindow>,
}

impl AugmentedSegment {
    pub fn with_source(mut self, source: SourceWindow) -> Self {
        self.source = Some(source);
        self
    }
}

fn rotate_about(p: Vec2, pivot: Vec2, angle: f64) -> Vec2 {
    (p - pivot).rotated(angle) + pivot
}

// Householder reflection of a direction vector across the axis direction.
fn reflect_vec(v: Vec2, axis_dir: Vec2) -> Vec2 {
    let two_alpha = 2.0 * axis_dir.angle();
    let (s, c) = two_alpha.sin_cos();
    Vec2::new(c * v.x + s * v.y, s * v.x - c * v.y)
}

fn reflect_point(p: Vec2, point: Vec2, axis_dir: Vec2) -> Vec2 {
    reflect_vec(p - point, axis_dir) + point
}

fn get2(v: &[f64], idx: [usize; 2]) -> Vec2 {
    Vec2::new(v[idx[0]], v[idx[1]])
}

fn set2(v: &mut [f64], idx: [usize; 2], p: Vec2) {
    v[idx[0]] = p.x;
    v[idx[1]] = p.y;
}

fn apply_to_state(state: &mut [f64], layout: &StateLayout, params: &TransformParams) {
    match params {
        TransformParams::Translate { delta } => {
            set2(state, layout.agent_pos, get2(state, layout.agent_pos) + *delta);
            if let Some(idx) = layout.object_pos {
                set2(state, idx, get2(state, idx) + *delta);
            }
        }
        TransformParams::Rotate { angle, pivot } => {
            set2(
                state,
                layout.agent_pos,
                rotate_about(get2(state, layout.agent_pos), *pivot, *angle),
            );
            if let Some(idx) = layout.object_pos {
                set2(state, idx, rotate_about(get2(state, idx), *pivot, *angle));
            }
            if let Some(idx) = layout.agent_vel {
                set2(state, idx, get2(state, idx).rotated(*angle));
            }
            if let Some(i) = layout.agent_heading {
                state[i] = wrap_angle(state[i] + angle);
            }
        }
        TransformParams::Reflect { point, dir } => {
            set2(
                state,
                layout.agent_pos,
                reflect_point(get2(state, layout.agent_pos), *point, *dir),
            );
            if let Some(idx) = layout.object_pos {
                set2(state, idx, reflect_point(get2(state, idx), *point, *dir));
            }
            if let Some(idx) = layout.agent_vel {
                set2(state, idx, reflect_vec(get2(state, idx), *dir));
            }
            if let Some(i) = layout.agent_heading {
                state[i] = wrap_angle(2.0 * dir.angle() - state[i]);
            }
        }
        TransformParams::RelabelGoal { goal } => {
            if let Some(idx) = layout.goal_pos {
                state[idx[0]] = goal[0];
                state[idx[1]] = goal[1];
            }
            if let Some(i) = layout.goal_heading {
                state[i] = goal[2];
            }
        }
    }
}

fn apply_to_action(action: &mut [f64], layout: &StateLayout, params: &TransformParams) {
    match params {
        TransformParams::Translate { .. } | TransformParams::RelabelGoal { .. } => {}
        TransformParams::Rotate { angle, .. } => {
            if let Some(idx) = layout.action_force {
                set2(action, idx, get2(action, idx).rotated(*angle));
            }
        }
        TransformParams::Reflect { dir, .. } => {
            if let Some(idx) = layout.action_force {
                set2(action, idx, reflect_vec(get2(action, idx), *dir));
            }
            if let Some(i) = layout.action_turn {
                action[i] = -action[i];
            }
        }
    }
}

// Geometry only: no validity check, no reward recomputation. Applying the
// same map to state and next_state keeps chaining exact bitwise.
fn apply_geometric(segment: &mut TrajectorySegment, layout: &StateLayout, params: &TransformParams) {
    for t in &mut segment.transitions {
        apply_to_state(&mut t.state, layout, params);
        apply_to_state(&mut t.next_state, layout, params);
        apply_to_action(&mut t.action, layout, params);
    }
}

fn finalize(
    mut segment: TrajectorySegment,
    transforms: Vec<TransformParams>,
    env: &EnvModel,
) -> Result<AugmentedSegment, DafError> {
    if !env.is_valid(&segment) {
        return Err(DafError::InvalidPlacement);
    }
    for t in &mut segment.transitions {
        t.reward = env.reward(&t.state, &t.action);
    }
    Ok(AugmentedSegment {
        segment,
        transforms,
        source: None,
    })
}

/// Shift all position components by `delta`; velocities, headings, actions,
/// and goal components are unchanged. Rewards are recomputed.
pub fn translate(segment: &TrajectorySegment, delta: Vec2, env: &EnvModel) -> Result<AugmentedSegment, DafError> {
    compose(segment, &[TransformParams::translate(delta)], env)
}

/// Rotate positions and spatial vectors by `angle` about `pivot`; headings
/// shift by `angle`. Rewards are recomputed.
pub fn rotate(
    segment: &TrajectorySegment,
    angle: f64,
    pivot: Vec2,
    env: &EnvModel,
) -> Result<AugmentedSegment, DafError> {
    compose(segment, &[TransformParams::rotate(angle, pivot)], env)
}

/// Reflect positions and spatial vectors across the axis through `point`
/// with direction `dir`; turning-rate actions negate. Rewards are recomputed.
pub fn reflect(
    segment: &TrajectorySegment,
    point: Vec2,
    dir: Vec2,
    env: &EnvModel,
) -> Result<AugmentedSegment, DafError> {
    compose(segment, &[TransformParams::reflect(point, dir)], env)
}

/// Replace the goal components of every state with `new_goal`, leaving the
/// physical states and actions untouched; rewards are recomputed against the
/// new goal. Errors on tasks without a goal component.
pub fn relabel_goal(
    segment: &TrajectorySegment,
    new_goal: Vec<f64>,
    env: &EnvModel,
) -> Result<AugmentedSegment, DafError> {
    compose(segment, &[TransformParams::relabel_goal(new_goal)], env)
}

/// Apply transforms in order; validity is checked and rewards are recomputed
/// once, after the final transform.
pub fn compose(
    segment: &TrajectorySegment,
    params: &[TransformParams],
    env: &EnvModel,
) -> Result<AugmentedSegment, DafError> {
    if params.is_empty() {
        return Err(DafError::EmptyCompose);
    }
    let layout = env.layout();
    let relabels = params
        .iter()
        .any(|p| matches!(p, TransformParams::RelabelGoal { .. }));
    if relabels && layout.goal_pos.is_none() {
        return Err(DafError::NoGoalComponent);
    }
    let mut out = segment.clone();
    for p in params {
        apply_geometric(&mut out, &layout, p);
    }
    finalize(out, params.to_vec(), env)
}
