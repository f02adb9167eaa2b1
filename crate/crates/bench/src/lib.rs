//! Shared fixtures for the criterion benchmarks.

use specmap_core::pipeline::generate_record;
use specmap_core::{ExperimentConfig, ScenarioRecord};

/// One record at the default 64x64 geometry.
pub fn default_record(density: f64, seed: u64) -> ScenarioRecord {
    generate_record(&ExperimentConfig::default(), seed, 0, density).expect("default config is valid")
}
