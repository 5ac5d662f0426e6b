//! Experiment harness: layered configuration, scenario pipelines, CSV
//! emission, and the run manifest.

pub mod config;
pub mod csvio;
pub mod manifest;
pub mod scenario;

pub use config::{load_config, FileConfig, Method, RunConfig, Scenario};
pub use manifest::RunManifest;
pub use scenario::run_scenario;
