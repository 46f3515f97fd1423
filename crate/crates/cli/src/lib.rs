//! Pipeline library behind the `guda` binary: configuration, scripted
//! demonstration controllers, and the file-based pipeline stages.

pub mod config;
pub mod demonstrator;
pub mod pipeline;

pub use config::{RunConfig, Strategy};
pub use pipeline::PipelineError;
