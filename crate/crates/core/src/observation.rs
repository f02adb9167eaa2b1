//! Sampling receivers, the incomplete cube and the binary semantic maps.

use rand::seq::index::sample;
use rand_distr::{Distribution, Normal};

use crate::cube::FrequencySpaceCube;
use crate::error::{Error, Result};
use crate::grid::{BinaryMap, Cell};
use crate::rng::{self, Purpose};
use crate::scene::Scene;

/// Receiver cells chosen for one scene. Cells are sorted row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    density: f64,
    receiver_cells: Vec<Cell>,
}

impl SamplingPlan {
    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn receiver_cells(&self) -> &[Cell] {
        &self.receiver_cells
    }

    pub fn len(&self) -> usize {
        self.receiver_cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.receiver_cells.is_empty()
    }
}

/// Number of receivers for a density over `free_cells` cells.
pub fn receiver_count(density: f64, free_cells: usize) -> usize {
    (density * free_cells as f64).round() as usize
}

/// Uniformly samples `round(density * #free)` distinct free cells.
pub fn place_receivers(scene: &Scene, density: f64, seed: u64) -> Result<SamplingPlan> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling density must be in (0, 1], got {density}"
        )));
    }
    let free = scene.free_cells();
    let count = receiver_count(density, free.len());
    if count == 0 {
        return Err(Error::InvalidArgument(format!(
            "density {density} over {} free cells places no receiver",
            free.len()
        )));
    }
    let mut rng = rng::stream(seed, Purpose::Receivers, 0);
    let mut receiver_cells: Vec<Cell> =
        sample(&mut rng, free.len(), count).into_iter().map(|idx| free[idx]).collect();
    receiver_cells.sort_unstable();
    Ok(SamplingPlan { density, receiver_cells })
}

/// Binary city map Z and binary sampling-location map M.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticMaps {
    pub city: BinaryMap,
    pub sampling: BinaryMap,
}

pub fn build_semantics(scene: &Scene, plan: &SamplingPlan) -> SemanticMaps {
    let mut sampling = BinaryMap::zeros(scene.grid().cells_per_side());
    for &cell in plan.receiver_cells() {
        sampling.set(cell, true);
    }
    SemanticMaps { city: scene.buildings().clone(), sampling }
}

/// Copies truth at receiver cells on every sampled layer; zeros elsewhere and
/// on the whole target layer.
pub fn build_incomplete_cube(
    truth: &FrequencySpaceCube,
    plan: &SamplingPlan,
    target_index: usize,
) -> FrequencySpaceCube {
    let mut incomplete = FrequencySpaceCube::filled(truth.side(), truth.layer_count(), 0.0);
    for k in (0..truth.layer_count()).filter(|&k| k != target_index) {
        for &cell in plan.receiver_cells() {
            incomplete.set(k, cell, truth.get(k, cell));
        }
    }
    incomplete
}

/// Adds i.i.d. Gaussian dB noise to the observed entries of `incomplete`.
pub fn add_measurement_noise(
    incomplete: &mut FrequencySpaceCube,
    plan: &SamplingPlan,
    target_index: usize,
    sigma_db: f64,
    seed: u64,
) -> Result<()> {
    if sigma_db == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma_db)
        .map_err(|e| Error::InvalidArgument(format!("measurement noise: {e}")))?;
    let mut rng = rng::stream(seed, Purpose::MeasurementNoise, 0);
    for k in (0..incomplete.layer_count()).filter(|&k| k != target_index) {
        for &cell in plan.receiver_cells() {
            let v = incomplete.get(k, cell) + normal.sample(&mut rng);
            incomplete.set(k, cell, v);
        }
    }
    Ok(())
}

/// `layers` identical copies of a binary map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCube {
    pub n: usize,
    pub layers: usize,
    pub values: Vec<u8>,
}

impl BinaryCube {
    pub fn layer(&self, k: usize) -> &[u8] {
        &self.values[k * self.n * self.n..(k + 1) * self.n * self.n]
    }
}

/// Stacks Z and M along the frequency axis.
pub fn stack_semantics_3d(maps: &SemanticMaps, layers: usize) -> Result<(BinaryCube, BinaryCube)> {
    if layers == 0 {
        return Err(Error::InvalidArgument("need at least one layer".into()));
    }
    let stack = |map: &BinaryMap| BinaryCube {
        n: map.side(),
        layers,
        values: map.as_bytes().repeat(layers),
    };
    Ok((stack(&maps.city), stack(&maps.sampling)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::propagation::{compute_ground_truth, PropagationParams};
    use crate::scene::{generate_scene, Emission, SceneConfig, Transmitter};

    fn open_scene(n: usize) -> Scene {
        let grid = GridSpec::new(4.0 * n as f64, n).unwrap();
        let tx = Transmitter { cell: Cell::new(0, 0), power_dbm: 20.0, emission: Emission::Broadband };
        Scene::new(grid, BinaryMap::zeros(n), vec![tx], vec![900.0, 1500.0, 1800.0, 2100.0], 2)
            .unwrap()
    }

    fn scene_with_buildings(n: usize, building_cells: usize) -> Scene {
        let grid = GridSpec::new(4.0 * n as f64, n).unwrap();
        let mut buildings = BinaryMap::zeros(n);
        for cell in grid.cells().skip(1).take(building_cells) {
            buildings.set(cell, true);
        }
        let tx = Transmitter { cell: Cell::new(0, 0), power_dbm: 20.0, emission: Emission::Broadband };
        Scene::new(grid, buildings, vec![tx], vec![900.0, 1800.0], 1).unwrap()
    }

    #[test]
    fn receiver_counts() {
        // round(0.05 * 4096) = round(204.8)
        assert_eq!(place_receivers(&open_scene(64), 0.05, 1).unwrap().len(), 205);
        assert_eq!(place_receivers(&open_scene(64), 1.0, 1).unwrap().len(), 4096);
        // round(0.2 * 3096) = round(619.2)
        let scene = scene_with_buildings(64, 1000);
        let plan = place_receivers(&scene, 0.2, 3).unwrap();
        assert_eq!(plan.len(), 619);
        assert!(plan.receiver_cells().iter().all(|&c| !scene.buildings().is_set(c)));
    }

    #[test]
    fn receiver_placement_is_seeded() {
        let scene = open_scene(16);
        let a = place_receivers(&scene, 0.3, 11).unwrap();
        assert_eq!(a, place_receivers(&scene, 0.3, 11).unwrap());
        assert_ne!(a, place_receivers(&scene, 0.3, 12).unwrap());
    }

    #[test]
    fn rejects_empty_or_invalid_density() {
        let scene = open_scene(4);
        assert!(place_receivers(&scene, 0.01, 0).is_err());
        assert!(place_receivers(&scene, 0.0, 0).is_err());
        assert!(place_receivers(&scene, 1.5, 0).is_err());
    }

    #[test]
    fn full_sampling_copies_all_but_target() {
        let scene = open_scene(8);
        let truth = compute_ground_truth(&scene, &PropagationParams::default(), 0).unwrap();
        let plan = place_receivers(&scene, 1.0, 0).unwrap();
        let s = build_incomplete_cube(&truth, &plan, 2);
        for k in 0..4 {
            if k == 2 {
                assert!(s.layer(k).iter().all(|&v| v == 0.0));
            } else {
                assert_eq!(s.layer(k), truth.layer(k));
            }
        }
    }

    #[test]
    fn nonzeros_per_layer_match_plan() {
        let config = SceneConfig::default();
        let scene = generate_scene(&config, 17).unwrap();
        let truth = compute_ground_truth(&scene, &PropagationParams::default(), 17).unwrap();
        let plan = place_receivers(&scene, 0.2, 17).unwrap();
        let s = build_incomplete_cube(&truth, &plan, scene.target_index());
        for k in 0..s.layer_count() {
            let nonzero = s.layer(k).iter().filter(|&&v| v != 0.0).count();
            let expected = if k == scene.target_index() { 0 } else { plan.len() };
            assert_eq!(nonzero, expected);
        }
    }

    #[test]
    fn semantics_match_scene_and_plan() {
        for seed in 0..100 {
            let scene = generate_scene(&SceneConfig { cells_per_side: 32, side_meters: 128.0, ..SceneConfig::default() }, seed).unwrap();
            let plan = place_receivers(&scene, 0.2, seed).unwrap();
            let maps = build_semantics(&scene, &plan);
            assert_eq!(&maps.city, scene.buildings());
            assert_eq!(maps.sampling.count_ones(), plan.len());
            let overlap = maps
                .city
                .as_bytes()
                .iter()
                .zip(maps.sampling.as_bytes())
                .filter(|(z, m)| **z * **m != 0)
                .count();
            assert_eq!(overlap, 0);
        }
        let empty = build_semantics(&open_scene(8), &place_receivers(&open_scene(8), 0.5, 0).unwrap());
        assert_eq!(empty.city.count_ones(), 0);
    }

    #[test]
    fn stacked_semantics_are_layer_constant() {
        let scene = scene_with_buildings(8, 10);
        let plan = place_receivers(&scene, 0.5, 4).unwrap();
        let maps = build_semantics(&scene, &plan);
        let (z, m) = stack_semantics_3d(&maps, 4).unwrap();
        for a in 0..4 {
            assert_eq!(z.layer(a), maps.city.as_bytes());
            assert_eq!(m.layer(a), maps.sampling.as_bytes());
            for b in 0..4 {
                assert_eq!(z.layer(a), z.layer(b));
            }
        }
        let (z1, _) = stack_semantics_3d(&maps, 1).unwrap();
        assert_eq!(z1.values, maps.city.as_bytes());
        assert!(stack_semantics_3d(&maps, 0).is_err());
    }

    #[test]
    fn measurement_noise_only_touches_observed_cells() {
        let scene = open_scene(8);
        let truth = compute_ground_truth(&scene, &PropagationParams::default(), 0).unwrap();
        let plan = place_receivers(&scene, 0.25, 0).unwrap();
        let clean = build_incomplete_cube(&truth, &plan, 2);
        let mut noisy = clean.clone();
        add_measurement_noise(&mut noisy, &plan, 2, 2.0, 9).unwrap();
        assert!(noisy.layer(2).iter().all(|&v| v == 0.0));
        for (c, n) in clean.values().iter().zip(noisy.values()) {
            assert_eq!(*c == 0.0, *n == 0.0);
        }
        assert_ne!(clean, noisy);
    }
}
