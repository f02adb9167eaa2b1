//! End-to-end steps over whole records: synthesize, reconstruct, evaluate.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::cube::FrequencySpaceCube;
use crate::dataset::{PredictionRecord, ScenarioRecord};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::metrics::{rmse, EvalReport, MaskPolicy};
use crate::observation::{add_measurement_noise, build_incomplete_cube, build_semantics, place_receivers};
use crate::propagation::compute_ground_truth;
use crate::reconstruct::{
    complete_target_layer, empirical_variogram, fit_variogram, idw_reconstruct, knn_reconstruct,
    kriging_reconstruct, SampleList, VariogramModel,
};
use crate::rng::scene_seed;
use crate::scene::generate_scene;

/// Builds record `scene_index` of a dataset drawn under `master_seed`.
pub fn generate_record(
    config: &ExperimentConfig,
    master_seed: u64,
    scene_index: u64,
    density: f64,
) -> Result<ScenarioRecord> {
    let seed = scene_seed(master_seed, scene_index);
    let scene = generate_scene(&config.scene, seed)?;
    let mut truth = compute_ground_truth(&scene, &config.propagation, seed)?;
    truth.quantize_f32();
    let plan = place_receivers(&scene, density, seed)?;
    let mut incomplete = build_incomplete_cube(&truth, &plan, scene.target_index());
    add_measurement_noise(&mut incomplete, &plan, scene.target_index(), config.measurement_noise_db, seed)?;
    incomplete.quantize_f32();
    Ok(ScenarioRecord {
        scene_id: scene_index,
        density: density as f32,
        seed,
        frequencies_mhz: scene.frequencies_mhz().to_vec(),
        target_index: scene.target_index(),
        truth,
        incomplete,
        semantics: build_semantics(&scene, &plan),
    })
}

/// `count` records with ids `0..count`, generated in parallel.
pub fn generate_dataset(
    config: &ExperimentConfig,
    master_seed: u64,
    count: u64,
    density: f64,
) -> Result<Vec<ScenarioRecord>> {
    config.validate()?;
    (0..count)
        .into_par_iter()
        .map(|idx| generate_record(config, master_seed, idx, density))
        .collect()
}

/// Per-layer spatial estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Idw { power: f64 },
    Knn { k: usize },
    Kriging { neighborhood: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Idw { .. } => "idw",
            Method::Knn { .. } => "knn",
            Method::Kriging { .. } => "kriging",
        }
    }
}

/// What happened while reconstructing one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReconstructionNotes {
    /// Layers whose variogram had too few lag bins to fit.
    pub fallback_variograms: usize,
    /// Layers whose empirical variogram was identically zero.
    pub degenerate_variograms: usize,
    pub jittered_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub estimate: FrequencySpaceCube,
    pub notes: ReconstructionNotes,
}

/// Fitted exponential model for one layer, falling back to the degenerate
/// model when the samples span fewer than three lag bins.
pub fn layer_variogram(samples: &SampleList, grid: &GridSpec) -> Result<(VariogramModel, ReconstructionNotes)> {
    let mut notes = ReconstructionNotes::default();
    let bins = empirical_variogram(samples, grid, 2.0 * grid.interval(), grid.side_meters() / 2.0)?;
    let model = match fit_variogram(&bins, grid) {
        Ok(fit) => {
            notes.degenerate_variograms += fit.degenerate as usize;
            fit.model
        }
        Err(Error::TooFewBins(_)) => {
            notes.fallback_variograms += 1;
            VariogramModel::degenerate(grid)
        }
        Err(e) => return Err(e),
    };
    Ok((model, notes))
}

/// Estimates every sampled layer from S and M, then completes the target
/// layer across frequency.
pub fn reconstruct_record(record: &ScenarioRecord, side_meters: f64, method: Method) -> Result<Reconstruction> {
    record.validate()?;
    let grid = GridSpec::new(side_meters, record.side())?;
    let layers = record.layer_count();
    let mut estimate = FrequencySpaceCube::filled(record.side(), layers, 0.0);
    let mut notes = ReconstructionNotes::default();
    for k in (0..layers).filter(|&k| k != record.target_index) {
        let samples = SampleList::from_layer(record.incomplete.layer(k), &record.semantics.sampling)?;
        let map = match method {
            Method::Idw { power } => idw_reconstruct(&samples, &grid, power)?,
            Method::Knn { k } => knn_reconstruct(&samples, &grid, k)?,
            Method::Kriging { neighborhood } => {
                let (model, fit_notes) = layer_variogram(&samples, &grid)?;
                notes.fallback_variograms += fit_notes.fallback_variograms;
                notes.degenerate_variograms += fit_notes.degenerate_variograms;
                let out = kriging_reconstruct(&samples, &grid, &model, neighborhood)?;
                notes.jittered_cells += out.jittered_cells;
                out.map
            }
        };
        estimate.layer_mut(k).copy_from_slice(map.values());
    }
    let target = complete_target_layer(&estimate, &record.frequencies_mhz, record.target_index)?;
    estimate.layer_mut(record.target_index).copy_from_slice(target.values());
    Ok(Reconstruction { estimate, notes })
}

/// Reconstructs every record in parallel, preserving order.
pub fn reconstruct_dataset(
    records: &[ScenarioRecord],
    side_meters: f64,
    method: Method,
) -> Result<Vec<(PredictionRecord, ReconstructionNotes)>> {
    records
        .par_iter()
        .map(|r| {
            let out = reconstruct_record(r, side_meters, method)?;
            Ok((PredictionRecord { scene_id: r.scene_id, estimate: out.estimate }, out.notes))
        })
        .collect()
}

/// One CSV line. `None` scene means an aggregate row, `None` frequency the
/// all-layer figure.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub scene_id: Option<u64>,
    pub density: f32,
    pub method: String,
    pub layer_freq_mhz: Option<f64>,
    pub rmse_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub rows: Vec<EvalRow>,
    /// Accumulated error per (density, method), densities ascending, methods
    /// in input order.
    pub aggregates: Vec<(f32, String, EvalReport)>,
}

/// Joins each labeled prediction set with the truth by scene id. Ids present
/// on one side only are an error.
pub fn evaluate(
    truth: &[ScenarioRecord],
    predictions: &[(String, Vec<PredictionRecord>)],
    mask: MaskPolicy,
) -> Result<Evaluation> {
    let Some(first) = truth.first() else {
        return Err(Error::InvalidArgument("truth dataset is empty".into()));
    };
    let freqs = &first.frequencies_mhz;
    let layers = freqs.len();
    let mut rows = Vec::new();
    // keyed by density bits so grouping is exact
    let mut groups: BTreeMap<(u32, usize), EvalReport> = BTreeMap::new();

    let mut seen = HashMap::new();
    for r in truth {
        if seen.insert(r.scene_id, ()).is_some() {
            return Err(Error::InvalidArgument(format!("scene {} appears twice in the truth", r.scene_id)));
        }
    }

    for (m, (label, preds)) in predictions.iter().enumerate() {
        let mut by_id: HashMap<u64, &PredictionRecord> = HashMap::with_capacity(preds.len());
        for p in preds {
            if by_id.insert(p.scene_id, p).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "{label}: scene {} predicted twice",
                    p.scene_id
                )));
            }
            if !seen.contains_key(&p.scene_id) {
                return Err(Error::InvalidArgument(format!(
                    "{label}: scene {} has no ground truth",
                    p.scene_id
                )));
            }
        }
        for r in truth {
            let pred = by_id.get(&r.scene_id).ok_or_else(|| {
                Error::InvalidArgument(format!("{label}: no prediction for scene {}", r.scene_id))
            })?;
            if r.frequencies_mhz != *freqs {
                return Err(Error::ShapeMismatch(format!(
                    "scene {} uses a different frequency list",
                    r.scene_id
                )));
            }
            let report = rmse(&pred.estimate, &r.truth, mask, &r.semantics.city)
                .map_err(|e| Error::ShapeMismatch(format!("{label}, scene {}: {e}", r.scene_id)))?;
            push_rows(&mut rows, Some(r.scene_id), r.density, label, freqs, &report);
            groups
                .entry((density_key(r.density), m))
                .or_insert_with(|| EvalReport::empty(mask, layers))
                .merge(&report)?;
        }
    }

    let mut keys: Vec<(u32, usize)> = groups.keys().copied().collect();
    keys.sort_by(|a, b| f32::from_bits(a.0).total_cmp(&f32::from_bits(b.0)).then(a.1.cmp(&b.1)));
    let mut aggregates = Vec::with_capacity(keys.len());
    for key in keys {
        let report = groups.remove(&key).expect("key from map");
        let density = f32::from_bits(key.0);
        let label = &predictions[key.1].0;
        push_rows(&mut rows, None, density, label, freqs, &report);
        aggregates.push((density, label.clone(), report));
    }
    Ok(Evaluation { rows, aggregates })
}

fn density_key(d: f32) -> u32 {
    // fold -0.0 into 0.0
    (d + 0.0).to_bits()
}

fn push_rows(
    rows: &mut Vec<EvalRow>,
    scene_id: Option<u64>,
    density: f32,
    method: &str,
    freqs: &[f64],
    report: &EvalReport,
) {
    for (k, &f) in freqs.iter().enumerate() {
        rows.push(EvalRow {
            scene_id,
            density,
            method: method.to_string(),
            layer_freq_mhz: Some(f),
            rmse_db: report.layer_rmse(k),
        });
    }
    rows.push(EvalRow {
        scene_id,
        density,
        method: method.to_string(),
        layer_freq_mhz: None,
        rmse_db: report.overall_rmse(),
    });
}

pub const CSV_HEADER: &str = "scene_id,density,method,layer_freq_mhz,rmse_db";

/// CSV with one row per (scene, method, layer) and `all` for aggregates.
pub fn rows_to_csv(rows: &[EvalRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let scene = row.scene_id.map_or_else(|| "all".to_string(), |id| id.to_string());
        let layer = row.layer_freq_mhz.map_or_else(|| "all".to_string(), |f| f.to_string());
        let _ = writeln!(out, "{scene},{},{},{layer},{}", row.density, row.method, row.rmse_db);
    }
    out
}
