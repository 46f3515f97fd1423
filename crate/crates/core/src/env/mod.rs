//! Deterministic 2D task models: point-mass maze navigation, kinematic-car
//! parking, and 2D soccer.
//!
//! Each model exposes pure functions of `(state, action)`: dynamics step,
//! true reward, state validity, initial-state sampling, and success/terminal
//! predicates. Determinism is what makes the transform equivariance
//! properties exactly testable, and purity makes every model safe for
//! concurrent use.

mod maze;
mod parking;
mod soccer;

pub use maze::{shortest_path_field, MazeModel, MazeSpec, ShortestPathField};
pub use parking::ParkingModel;
pub use soccer::SoccerModel;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::{ActionVector, MdpSpec, StateVector, TrajectorySegment, Vec2};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error("action bounds")]
    ActionBounds,
    #[error("state dimension: expected {expected}, got {got}")]
    StateDim { expected: usize, got: usize },
    #[error("maze layout: {0}")]
    Layout(String),
}

/// Where the geometric roles live inside a task's flat state and action
/// vectors. Transforms are written against this description instead of
/// per-task code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    /// Indices of the agent position (x, y).
    pub agent_pos: [usize; 2],
    /// Velocity vector components, if the task has any.
    pub agent_vel: Option<[usize; 2]>,
    /// Heading angle index, if the task has one.
    pub agent_heading: Option<usize>,
    /// Movable object position (the ball), if present.
    pub object_pos: Option<[usize; 2]>,
    /// Goal pose carried inside the state, if the task is goal-conditioned.
    pub goal_pos: Option<[usize; 2]>,
    pub goal_heading: Option<usize>,
    /// Action components forming a spatial vector (forces): rotate and
    /// reflect with the state.
    pub action_force: Option<[usize; 2]>,
    /// Turning-rate action component: negates under reflection.
    pub action_turn: Option<usize>,
}

/// A task model bundled with its MDP metadata.
#[derive(Debug, Clone)]
pub struct EnvModel {
    pub task: String,
    pub mdp: MdpSpec,
    pub model: TaskModel,
}

#[derive(Debug, Clone)]
pub enum TaskModel {
    Maze(MazeModel),
    Parking(ParkingModel),
    Soccer(SoccerModel),
}

/// Optional overrides for the physics and episode constants, wired to the
/// run config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnvOverrides {
    pub dt: Option<f64>,
    pub friction: Option<f64>,
    pub v_max: Option<f64>,
    pub goal_radius: Option<f64>,
    pub horizon: Option<usize>,
    pub gamma: Option<f64>,
}

pub const REGISTERED_TASKS: &[&str] = &[
    "maze-umaze",
    "maze-medium",
    "maze-large",
    "maze-arena",
    "parking",
    "soccer",
];

impl EnvModel {
    pub fn for_task(task: &str) -> Result<EnvModel, EnvError> {
        Self::for_task_with(task, EnvOverrides::default())
    }

    pub fn for_task_with(task: &str, overrides: EnvOverrides) -> Result<EnvModel, EnvError> {
        match task {
            "maze-umaze" => Self::from_maze(task, MazeSpec::parse(maze::UMAZE_LAYOUT)?, overrides),
            "maze-medium" => Self::from_maze(task, MazeSpec::parse(maze::MEDIUM_LAYOUT)?, overrides),
            "maze-large" => Self::from_maze(task, MazeSpec::parse(maze::LARGE_LAYOUT)?, overrides),
            "maze-arena" => Self::from_maze(task, MazeSpec::parse(maze::ARENA_LAYOUT)?, overrides),
            "parking" => Ok(Self::from_parking(ParkingModel::standard(overrides), overrides)),
            "soccer" => Ok(Self::from_soccer(SoccerModel::standard(overrides), overrides)),
            other => Err(EnvError::UnknownTask(other.to_string())),
        }
    }

    /// Build a maze task around a custom layout, e.g. one loaded from a
    /// layout text file.
    pub fn from_maze(task: &str, spec: MazeSpec, overrides: EnvOverrides) -> Result<EnvModel, EnvError> {
        let model = MazeModel::new(spec, overrides);
        let mdp = MdpSpec {
            state_dim: 4,
            action_dim: 2,
            gamma: overrides.gamma.unwrap_or(0.99),
            horizon: overrides.horizon.unwrap_or(300),
            action_low: vec![-1.0, -1.0],
            action_high: vec![1.0, 1.0],
        };
        Ok(EnvModel {
            task: task.to_string(),
            mdp,
            model: TaskModel::Maze(model),
        })
    }

    fn from_parking(model: ParkingModel, overrides: EnvOverrides) -> EnvModel {
        let mdp = MdpSpec {
            state_dim: 7,
            action_dim: 2,
            gamma: overrides.gamma.unwrap_or(0.99),
            horizon: overrides.horizon.unwrap_or(120),
            action_low: vec![-1.0, -1.0],
            action_high: vec![1.0, 1.0],
        };
        EnvModel {
            task: "parking".to_string(),
            mdp,
            model: TaskModel::Parking(model),
        }
    }

    fn from_soccer(model: SoccerModel, overrides: EnvOverrides) -> EnvModel {
        let mdp = MdpSpec {
            state_dim: 5,
            action_dim: 2,
            gamma: overrides.gamma.unwrap_or(0.99),
            horizon: overrides.horizon.unwrap_or(400),
            action_low: vec![-1.0, -1.0],
            action_high: vec![1.0, 1.0],
        };
        EnvModel {
            task: "soccer".to_string(),
            mdp,
            model: TaskModel::Soccer(model),
        }
    }

    pub fn layout(&self) -> StateLayout {
        match &self.model {
            TaskModel::Maze(_) => StateLayout {
                agent_pos: [0, 1],
                agent_vel: Some([2, 3]),
                agent_heading: None,
                object_pos: None,
                goal_pos: None,
                goal_heading: None,
                action_force: Some([0, 1]),
                action_turn: None,
            },
            TaskModel::Parking(_) => StateLayout {
                agent_pos: [0, 1],
                agent_vel: None,
                agent_heading: Some(2),
                object_pos: None,
                goal_pos: Some([4, 5]),
                goal_heading: Some(6),
                action_force: None,
                action_turn: Some(1),
            },
            TaskModel::Soccer(_) => StateLayout {
                agent_pos: [0, 1],
                agent_vel: None,
                agent_heading: Some(2),
                object_pos: Some([3, 4]),
                goal_pos: None,
                goal_heading: None,
                action_force: None,
                action_turn: Some(1),
            },
        }
    }

    pub fn maze(&self) -> Option<&MazeModel> {
        match &self.model {
            TaskModel::Maze(m) => Some(m),
            _ => None,
        }
    }

    pub fn parking(&self) -> Option<&ParkingModel> {
        match &self.model {
            TaskModel::Parking(m) => Some(m),
            _ => None,
        }
    }

    pub fn soccer(&self) -> Option<&SoccerModel> {
        match &self.model {
            TaskModel::Soccer(m) => Some(m),
            _ => None,
        }
    }

    fn check_io(&self, state: &[f64], action: &[f64]) -> Result<(), EnvError> {
        if state.len() != self.mdp.state_dim {
            return Err(EnvError::StateDim {
                expected: self.mdp.state_dim,
                got: state.len(),
            });
        }
        if !self.mdp.action_in_bounds(action) {
            return Err(EnvError::ActionBounds);
        }
        Ok(())
    }

    /// One deterministic dynamics step.
    pub fn step(&self, state: &StateVector, action: &ActionVector) -> Result<StateVector, EnvError> {
        self.check_io(state, action)?;
        Ok(match &self.model {
            TaskModel::Maze(m) => m.step(state, action),
            TaskModel::Parking(m) => m.step(state, action),
            TaskModel::Soccer(m) => m.step(state, action),
        })
    }

    /// True reward for taking `action` in `state`.
    pub fn reward(&self, state: &StateVector, action: &ActionVector) -> f64 {
        match &self.model {
            TaskModel::Maze(m) => m.reward(state, action),
            TaskModel::Parking(m) => m.reward(state, action),
            TaskModel::Soccer(m) => m.reward(state, action),
        }
    }

    /// Per-state validity (inside bounds, not inside a wall).
    pub fn state_valid(&self, state: &StateVector) -> bool {
        match &self.model {
            TaskModel::Maze(m) => m.state_valid(state),
            TaskModel::Parking(m) => m.state_valid(state),
            TaskModel::Soccer(m) => m.state_valid(state),
        }
    }

    /// Segment validity: every state and next state must satisfy the task's
    /// state invariants. The final next state is exempt when its transition
    /// is marked terminal, which is how episode-ending out-of-bounds states
    /// are recorded.
    pub fn is_valid(&self, segment: &TrajectorySegment) -> bool {
        for (i, t) in segment.transitions.iter().enumerate() {
            if !self.state_valid(&t.state) {
                return false;
            }
            let last = i + 1 == segment.transitions.len();
            if !self.state_valid(&t.next_state) && !(last && t.terminal) {
                return false;
            }
        }
        true
    }

    /// Draw an initial state from the task's start distribution.
    pub fn sample_initial(&self, rng: &mut ChaCha8Rng) -> StateVector {
        match &self.model {
            TaskModel::Maze(m) => m.sample_initial(rng),
            TaskModel::Parking(m) => m.sample_initial(rng),
            TaskModel::Soccer(m) => m.sample_initial(rng),
        }
    }

    /// Whether a single state satisfies the task's success condition.
    pub fn state_success(&self, state: &StateVector) -> bool {
        match &self.model {
            TaskModel::Maze(m) => m.state_success(state),
            TaskModel::Parking(m) => m.state_success(state),
            TaskModel::Soccer(m) => m.state_success(state),
        }
    }

    /// Episode-level success. Mazes and soccer succeed if any visited state
    /// satisfies the condition; parking judges the final pose.
    pub fn is_success(&self, segment: &TrajectorySegment) -> bool {
        match &self.model {
            TaskModel::Maze(_) | TaskModel::Soccer(_) => {
                segment.transitions.iter().any(|t| self.state_success(&t.state))
                    || self.state_success(&segment.last().next_state)
            }
            TaskModel::Parking(_) => self.state_success(&segment.last().next_state),
        }
    }

    /// Whether an episode should end at this state (success reached or the
    /// state left the playable area).
    pub fn is_terminal(&self, state: &StateVector) -> bool {
        match &self.model {
            TaskModel::Maze(m) => m.state_success(state),
            TaskModel::Parking(m) => m.state_success(state) || !m.state_valid(state),
            TaskModel::Soccer(m) => m.state_success(state) || !m.state_valid(state),
        }
    }

    /// Axis-aligned bounding box of the playable area, used by uniform
    /// placement draws.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match &self.model {
            TaskModel::Maze(m) => m.bounding_box(),
            TaskModel::Parking(m) => (m.lot_min, m.lot_max),
            TaskModel::Soccer(m) => (m.field_min, m.field_max),
        }
    }

    /// Per-dimension state bounds for observation normalization.
    pub fn state_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        use std::f64::consts::PI;
        match &self.model {
            TaskModel::Maze(m) => {
                let (lo, hi) = m.bounding_box();
                (
                    vec![lo.x, lo.y, -m.v_max, -m.v_max],
                    vec![hi.x, hi.y, m.v_max, m.v_max],
                )
            }
            TaskModel::Parking(m) => (
                vec![m.lot_min.x, m.lot_min.y, -PI, -m.v_max, m.lot_min.x, m.lot_min.y, -PI],
                vec![m.lot_max.x, m.lot_max.y, PI, m.v_max, m.lot_max.x, m.lot_max.y, PI],
            ),
            TaskModel::Soccer(m) => (
                vec![m.field_min.x, m.field_min.y, -PI, m.field_min.x, m.field_min.y],
                vec![m.field_max.x, m.field_max.y, PI, m.field_max.x, m.field_max.y],
            ),
        }
    }
}
