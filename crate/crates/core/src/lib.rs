//! Frequency-space spectrum maps for urban scenes.
//!
//! The crate synthesizes multi-frequency received-power maps over a gridded
//! city, samples them with sparse receivers, reconstructs complete maps with
//! classical spatial estimators plus cross-frequency completion, and scores
//! the result in dB RMSE. Datasets and predictions move between tools in a
//! fixed little-endian container format (see [`dataset`]).

pub mod config;
pub mod cube;
pub mod dataset;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod observation;
pub mod pipeline;
pub mod propagation;
pub mod reconstruct;
pub mod render;
pub mod rng;
pub mod scene;

pub use config::ExperimentConfig;
pub use cube::FrequencySpaceCube;
pub use dataset::{PredictionRecord, ScenarioRecord};
pub use error::{Error, Result};
pub use grid::{BinaryMap, Cell, GridSpec, Map2};
pub use metrics::{EvalReport, MaskPolicy};
pub use observation::{SamplingPlan, SemanticMaps};
pub use pipeline::Method;
pub use propagation::PropagationParams;
pub use reconstruct::{SampleList, VariogramModel};
pub use scene::{Emission, FrequencyMode, Scene, SceneConfig, Transmitter};
