//! Obstacle-aware log-distance propagation with multi-transmitter
//! superposition and optional correlated log-normal shadowing.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cube::FrequencySpaceCube;
use crate::error::{Error, Result};
use crate::grid::{BinaryMap, Cell};
use crate::rng::{self, Purpose};
use crate::scene::Scene;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationParams {
    pub path_loss_exponent: f64,
    /// dB added per building cell the direct path crosses.
    pub wall_loss_per_cell: f64,
    pub wall_loss_cap: f64,
    /// Meters.
    pub reference_distance: f64,
    /// dBm; every output value is clamped from below to this.
    pub noise_floor: f64,
    /// dB, 0 disables shadowing.
    pub shadowing_sigma: f64,
    /// Smoothing kernel standard deviation in cells.
    pub shadowing_correlation_cells: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            path_loss_exponent: 3.0,
            wall_loss_per_cell: 2.0,
            wall_loss_cap: 60.0,
            reference_distance: 1.0,
            noise_floor: -150.0,
            shadowing_sigma: 0.0,
            shadowing_correlation_cells: 8.0,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.path_loss_exponent,
            self.wall_loss_per_cell,
            self.wall_loss_cap,
            self.reference_distance,
            self.noise_floor,
            self.shadowing_sigma,
            self.shadowing_correlation_cells,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("propagation parameters must be finite".into()));
        }
        if self.path_loss_exponent < 2.0 {
            return Err(Error::Config(format!(
                "path loss exponent {} is below free space",
                self.path_loss_exponent
            )));
        }
        if self.wall_loss_per_cell < 0.0 || self.wall_loss_cap < 0.0 || self.shadowing_sigma < 0.0 {
            return Err(Error::Config("losses and shadowing sigma must be non-negative".into()));
        }
        if self.reference_distance <= 0.0 || self.shadowing_correlation_cells < 0.0 {
            return Err(Error::Config(
                "reference distance must be positive and correlation length non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Free-space loss at 1 m for a frequency in MHz.
pub fn free_space_reference_db(freq_mhz: f64) -> f64 {
    20.0 * freq_mhz.log10() - 27.55
}

/// Path loss in dB. Distances below `min_distance` are clamped to it.
pub fn path_loss_db(
    freq_mhz: f64,
    distance_m: f64,
    walls_crossed: u32,
    params: &PropagationParams,
    min_distance: f64,
) -> Result<f64> {
    if !(freq_mhz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "frequency must be positive, got {freq_mhz}"
        )));
    }
    if !(distance_m >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distance must be non-negative, got {distance_m}"
        )));
    }
    Ok(path_loss_unchecked(freq_mhz, distance_m.max(min_distance), walls_crossed, params))
}

fn path_loss_unchecked(freq_mhz: f64, distance_m: f64, walls: u32, params: &PropagationParams) -> f64 {
    free_space_reference_db(freq_mhz)
        + 10.0 * params.path_loss_exponent * (distance_m / params.reference_distance).log10()
        + wall_loss(walls, params)
}

fn wall_loss(walls: u32, params: &PropagationParams) -> f64 {
    (walls as f64 * params.wall_loss_per_cell).min(params.wall_loss_cap)
}

/// Counts occupied cells whose interior the segment between the centers of
/// `a` and `b` passes through, not counting `a` and `b`.
///
/// Exact grid traversal in integer arithmetic. Coordinates are doubled so
/// centers sit on odd integers and cell boundaries on even ones; a segment
/// through a lattice vertex steps diagonally and never enters the two cells
/// that only touch it at the corner.
pub fn count_wall_crossings(buildings: &BinaryMap, a: Cell, b: Cell) -> u32 {
    let di = b.i as i64 - a.i as i64;
    let dj = b.j as i64 - a.j as i64;
    let (ni, nj) = (di.unsigned_abs(), dj.unsigned_abs());
    let (si, sj) = (di.signum(), dj.signum());

    let mut ci = a.i as i64;
    let mut cj = a.j as i64;
    let (mut ki, mut kj) = (0u64, 0u64);
    let mut walls = 0;
    while ki < ni || kj < nj {
        // Parameter of the next boundary on each axis is (1 + 2k) / (2n);
        // compare by cross-multiplying.
        let step_i;
        let step_j;
        if ki == ni {
            (step_i, step_j) = (false, true);
        } else if kj == nj {
            (step_i, step_j) = (true, false);
        } else {
            let ti = (1 + 2 * ki) * nj;
            let tj = (1 + 2 * kj) * ni;
            (step_i, step_j) = (ti <= tj, tj <= ti);
        }
        if step_i {
            ci += si;
            ki += 1;
        }
        if step_j {
            cj += sj;
            kj += 1;
        }
        let cell = Cell::new(ci as usize, cj as usize);
        if cell != b && buildings.is_set(cell) {
            walls += 1;
        }
    }
    walls
}

/// Received power in dBm at every cell of every frequency layer.
pub fn compute_ground_truth(
    scene: &Scene,
    params: &PropagationParams,
    shadow_seed: u64,
) -> Result<FrequencySpaceCube> {
    params.validate()?;
    let grid = scene.grid();
    let n = grid.cells_per_side();
    let layers = scene.layer_count();
    let min_distance = grid.interval() / 2.0;

    // Frequency-independent part of each transmitter's received power:
    // power - distance term - wall term, per cell.
    let gains: Vec<Vec<f64>> = scene
        .transmitters()
        .iter()
        .map(|tx| {
            let cells: Vec<Cell> = grid.cells().collect();
            cells
                .par_iter()
                .map(|&cell| {
                    let d = grid.distance(tx.cell, cell).max(min_distance);
                    let walls = count_wall_crossings(scene.buildings(), tx.cell, cell);
                    tx.power_dbm
                        - 10.0 * params.path_loss_exponent * (d / params.reference_distance).log10()
                        - wall_loss(walls, params)
                })
                .collect()
        })
        .collect();

    let mut cube = FrequencySpaceCube::filled(n, layers, params.noise_floor);
    for (k, &freq) in scene.frequencies_mhz().iter().enumerate() {
        let contributing: Vec<&Vec<f64>> = scene
            .transmitters()
            .iter()
            .zip(&gains)
            .filter(|(tx, _)| tx.emission.covers(k))
            .map(|(_, g)| g)
            .collect();
        if contributing.is_empty() {
            continue;
        }
        let reference = free_space_reference_db(freq);
        let shadow = (params.shadowing_sigma > 0.0)
            .then(|| shadowing_field(n, params, shadow_seed, k as u64));
        let layer = cube.layer_mut(k);
        for (idx, out) in layer.iter_mut().enumerate() {
            let total_mw: f64 = contributing
                .iter()
                .map(|g| 10f64.powf((g[idx] - reference) / 10.0))
                .sum();
            let mut dbm = 10.0 * total_mw.log10();
            if let Some(field) = &shadow {
                dbm += field[idx];
            }
            *out = dbm.max(params.noise_floor);
        }
    }
    Ok(cube)
}

/// Zero-mean field with standard deviation `shadowing_sigma`: white Gaussian
/// noise smoothed by a truncated Gaussian kernel, then rescaled.
pub fn shadowing_field(n: usize, params: &PropagationParams, seed: u64, layer: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, Purpose::Shadowing, layer);
    let white: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let sigma = params.shadowing_correlation_cells;
    let smooth = if sigma > 0.0 {
        let radius = (3.0 * sigma).ceil() as i64;
        let kernel: Vec<f64> = (-radius..=radius)
            .map(|t| (-(t * t) as f64 / (2.0 * sigma * sigma)).exp())
            .collect();
        let rows = convolve_axis(&white, n, &kernel, radius, true);
        convolve_axis(&rows, n, &kernel, radius, false)
    } else {
        white
    };
    let count = smooth.len() as f64;
    let mean = smooth.iter().sum::<f64>() / count;
    let var = smooth.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    let scale = if var > 0.0 { params.shadowing_sigma / var.sqrt() } else { 0.0 };
    smooth.iter().map(|v| (v - mean) * scale).collect()
}

// Separable pass with renormalized weights at the borders.
fn convolve_axis(src: &[f64], n: usize, kernel: &[f64], radius: i64, along_j: bool) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (mut acc, mut norm) = (0.0, 0.0);
            for (t, w) in (-radius..=radius).zip(kernel) {
                let (ii, jj) = if along_j { (i as i64, j as i64 + t) } else { (i as i64 + t, j as i64) };
                if ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                    continue;
                }
                acc += w * src[ii as usize * n + jj as usize];
                norm += w;
            }
            out[i * n + j] = acc / norm;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::scene::{Emission, Transmitter};

    fn single_tx_scene(n: usize, side: f64, txs: Vec<Transmitter>) -> Scene {
        let grid = GridSpec::new(side, n).unwrap();
        Scene::new(grid, BinaryMap::zeros(n), txs, vec![900.0, 1500.0, 1800.0, 2100.0], 2).unwrap()
    }

    #[test]
    fn reference_loss_at_one_meter() {
        let params = PropagationParams::default();
        // 20*log10(900) - 27.55 = 59.0849 - 27.55
        let pl = path_loss_db(900.0, 1.0, 0, &params, 0.5).unwrap();
        assert!((pl - 31.5349).abs() < 0.01, "{pl}");
    }

    #[test]
    fn decade_of_distance_costs_thirty_db() {
        let params = PropagationParams::default();
        let near = path_loss_db(900.0, 1.0, 0, &params, 0.5).unwrap();
        let far = path_loss_db(900.0, 10.0, 0, &params, 0.5).unwrap();
        assert!((far - near - 30.0).abs() < 1e-12);
    }

    #[test]
    fn wall_loss_is_capped() {
        let params = PropagationParams::default();
        let open = path_loss_db(900.0, 1.0, 0, &params, 0.5).unwrap();
        let walled = path_loss_db(900.0, 1.0, 100, &params, 0.5).unwrap();
        let uncapped = 100.0 * params.wall_loss_per_cell;
        assert!(uncapped > params.wall_loss_cap);
        assert!((walled - open - 60.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_rejects_bad_inputs() {
        let params = PropagationParams::default();
        assert!(path_loss_db(0.0, 1.0, 0, &params, 0.5).is_err());
        assert!(path_loss_db(-5.0, 1.0, 0, &params, 0.5).is_err());
        assert!(path_loss_db(900.0, -1.0, 0, &params, 0.5).is_err());
    }

    #[test]
    fn distance_clamp_applies_below_half_cell() {
        let params = PropagationParams::default();
        let clamped = path_loss_db(900.0, 0.0, 0, &params, 2.0).unwrap();
        let at_half_cell = path_loss_db(900.0, 2.0, 0, &params, 2.0).unwrap();
        assert_eq!(clamped, at_half_cell);
    }

    #[test]
    fn walls_on_empty_grid_and_degenerate_segment() {
        let empty = BinaryMap::zeros(8);
        assert_eq!(count_wall_crossings(&empty, Cell::new(0, 0), Cell::new(7, 5)), 0);
        let full = BinaryMap::from_vec(4, vec![1; 16]).unwrap();
        assert_eq!(count_wall_crossings(&full, Cell::new(2, 2), Cell::new(2, 2)), 0);
    }

    #[test]
    fn diagonal_through_vertex_skips_corner_cells() {
        let mut map = BinaryMap::zeros(3);
        map.set(Cell::new(0, 1), true);
        map.set(Cell::new(1, 0), true);
        assert_eq!(count_wall_crossings(&map, Cell::new(0, 0), Cell::new(1, 1)), 0);
        map.set(Cell::new(1, 1), true);
        assert_eq!(count_wall_crossings(&map, Cell::new(0, 0), Cell::new(2, 2)), 1);
    }

    #[test]
    fn straight_line_counts_every_blocked_cell() {
        let mut map = BinaryMap::zeros(6);
        for j in 1..5 {
            map.set(Cell::new(3, j), true);
        }
        assert_eq!(count_wall_crossings(&map, Cell::new(3, 0), Cell::new(3, 5)), 4);
        // endpoints are not counted even when occupied
        assert_eq!(count_wall_crossings(&map, Cell::new(3, 1), Cell::new(3, 4)), 2);
    }

    #[test]
    fn source_cell_is_layer_maximum() {
        let params = PropagationParams::default();
        let tx = Transmitter { cell: Cell::new(10, 20), power_dbm: 20.0, emission: Emission::Broadband };
        let scene = single_tx_scene(32, 128.0, vec![tx]);
        let cube = compute_ground_truth(&scene, &params, 0).unwrap();
        for k in 0..4 {
            let f = scene.frequencies_mhz()[k];
            let expected = 20.0 - path_loss_db(f, 0.0, 0, &params, 2.0).unwrap();
            let at_source = cube.get(k, Cell::new(10, 20));
            assert!((at_source - expected).abs() < 1e-9);
            assert!(cube.layer(k).iter().all(|&v| v <= at_source));
        }
    }

    #[test]
    fn co_located_pair_adds_three_db() {
        let params = PropagationParams::default();
        let tx = Transmitter { cell: Cell::new(5, 9), power_dbm: 17.0, emission: Emission::Broadband };
        let one = compute_ground_truth(&single_tx_scene(16, 64.0, vec![tx.clone()]), &params, 0).unwrap();
        let two = compute_ground_truth(&single_tx_scene(16, 64.0, vec![tx.clone(), tx]), &params, 0).unwrap();
        let delta = 10.0 * 2f64.log10();
        assert!((delta - 3.0103).abs() < 1e-4);
        for (a, b) in one.values().iter().zip(two.values()) {
            assert!((b - a - delta).abs() < 1e-9);
        }
    }

    #[test]
    fn silent_layers_sit_at_noise_floor() {
        let params = PropagationParams::default();
        let tx = Transmitter { cell: Cell::new(1, 1), power_dbm: 20.0, emission: Emission::Single(3) };
        let cube = compute_ground_truth(&single_tx_scene(8, 32.0, vec![tx]), &params, 0).unwrap();
        for k in 0..3 {
            assert!(cube.layer(k).iter().all(|&v| v == params.noise_floor));
        }
        assert!(cube.layer(3).iter().all(|&v| v > params.noise_floor));
    }

    #[test]
    fn shadowing_is_seeded_and_scaled() {
        let params = PropagationParams { shadowing_sigma: 6.0, ..PropagationParams::default() };
        let a = shadowing_field(32, &params, 5, 0);
        assert_eq!(a, shadowing_field(32, &params, 5, 0));
        assert_ne!(a, shadowing_field(32, &params, 5, 1));
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let std = (a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / a.len() as f64).sqrt();
        assert!(mean.abs() < 1e-9);
        assert!((std - 6.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = PropagationParams { path_loss_exponent: 1.5, ..PropagationParams::default() };
        assert!(bad.validate().is_err());
        let bad = PropagationParams { wall_loss_per_cell: -1.0, ..PropagationParams::default() };
        assert!(bad.validate().is_err());
    }
}
