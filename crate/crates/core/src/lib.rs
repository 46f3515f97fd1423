//! Guided trajectory data augmentation for offline learning from demonstration.
//!
//! The pipeline turns a handful of demonstration episodes into a large
//! augmented dataset by applying rigid-motion transforms (translate, rotate,
//! reflect) and goal relabeling to trajectory segments, with transform
//! parameters drawn either uniformly at random or under task-specific guided
//! sampling rules that make every augmented segment depict task progress.
//! A behavior-cloning learner and evaluation statistics (IQM, bootstrap
//! confidence intervals, Welch t-tests) close the loop.
//!
//! Module map:
//! - [`data`]: transitions, segments, datasets, JSONL serialization, seeded
//!   random streams.
//! - [`env`]: deterministic 2D task models (point-mass maze, kinematic-car
//!   parking, 2D soccer) with true reward functions and validity checks.
//! - [`daf`]: the segment transforms themselves, parameterized and
//!   deterministic; rewards are always recomputed from the task model.
//! - [`sampling`]: random and guided parameter sampling with rejection, and
//!   augmented-dataset construction.
//! - [`learner`]: a small from-scratch MLP policy trained by SGD behavior
//!   cloning, with a pluggable learner interface.
//! - [`eval`]: rollouts, normalized returns, IQM, bootstrap CIs, and
//!   strategy comparison reports.

pub mod daf;
pub mod data;
pub mod env;
pub mod eval;
pub mod learner;
pub mod sampling;

pub use data::{Dataset, MdpSpec, RngStream, TrajectorySegment, Transition, Vec2};
pub use env::EnvModel;
