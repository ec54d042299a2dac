//! Figure presets, free-form scenarios, output writers and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod figures;
pub mod output;
mod runner;

pub use config::ScenarioConfig;
pub use output::{write_output, Format, FrameStack, RunOutput, Series};
pub use runner::run_config;
