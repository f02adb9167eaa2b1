//! Randomized urban scenes: rectangular buildings rasterized onto the grid
//! plus a handful of transmitters on free cells.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{BinaryMap, Cell, GridSpec};
use crate::rng::{self, Purpose};

/// Which frequency layers a transmitter emits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emission {
    /// One index into the scene's frequency list.
    Single(usize),
    /// Every frequency of the scene.
    Broadband,
}

impl Emission {
    pub fn covers(self, layer: usize) -> bool {
        match self {
            Emission::Single(k) => k == layer,
            Emission::Broadband => true,
        }
    }
}

/// How `generate_scene` assigns emissions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyMode {
    /// Each transmitter picks one frequency uniformly.
    #[default]
    Single,
    Broadband,
}

impl FrequencyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyMode::Single => "single",
            FrequencyMode::Broadband => "broadband",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transmitter {
    pub cell: Cell,
    pub power_dbm: f64,
    pub emission: Emission,
}

/// Parameters of the random city and transmitter generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub side_meters: f64,
    pub cells_per_side: usize,
    /// Strictly ascending, MHz.
    pub frequencies_mhz: Vec<f64>,
    pub target_mhz: f64,
    pub buildings_min: usize,
    pub buildings_max: usize,
    /// Rectangle side bounds, in multiples of the cell interval.
    pub building_side_min_cells: f64,
    pub building_side_max_cells: f64,
    pub transmitters_min: usize,
    pub transmitters_max: usize,
    pub power_min_dbm: f64,
    pub power_max_dbm: f64,
    pub frequency_mode: FrequencyMode,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            side_meters: 256.0,
            cells_per_side: 64,
            frequencies_mhz: vec![900.0, 1500.0, 1800.0, 2100.0],
            target_mhz: 1800.0,
            buildings_min: 3,
            buildings_max: 12,
            building_side_min_cells: 4.0,
            building_side_max_cells: 16.0,
            transmitters_min: 1,
            transmitters_max: 5,
            power_min_dbm: 10.0,
            power_max_dbm: 30.0,
            frequency_mode: FrequencyMode::Single,
        }
    }
}

impl SceneConfig {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.side_meters, self.cells_per_side)
    }

    pub fn target_index(&self) -> Result<usize> {
        self.frequencies_mhz
            .iter()
            .position(|&f| f == self.target_mhz)
            .ok_or_else(|| {
                Error::Config(format!(
                    "target frequency {} MHz is not in {:?}",
                    self.target_mhz, self.frequencies_mhz
                ))
            })
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        validate_frequencies(&self.frequencies_mhz)?;
        self.target_index()?;
        if self.buildings_min > self.buildings_max {
            return Err(Error::Config("buildings_min exceeds buildings_max".into()));
        }
        if !(self.building_side_min_cells > 0.0
            && self.building_side_min_cells <= self.building_side_max_cells
            && self.building_side_max_cells.is_finite())
        {
            return Err(Error::Config(format!(
                "building side bounds [{}, {}] invalid",
                self.building_side_min_cells, self.building_side_max_cells
            )));
        }
        if self.transmitters_min == 0 || self.transmitters_min > self.transmitters_max {
            return Err(Error::Config(format!(
                "transmitter count bounds [{}, {}] invalid",
                self.transmitters_min, self.transmitters_max
            )));
        }
        if !(self.power_min_dbm.is_finite()
            && self.power_max_dbm.is_finite()
            && self.power_min_dbm <= self.power_max_dbm)
        {
            return Err(Error::Config(format!(
                "power bounds [{}, {}] invalid",
                self.power_min_dbm, self.power_max_dbm
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_frequencies(frequencies: &[f64]) -> Result<()> {
    if frequencies.is_empty() {
        return Err(Error::Config("frequency list is empty".into()));
    }
    if frequencies.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::Config(format!(
            "frequencies must be positive: {frequencies:?}"
        )));
    }
    if frequencies.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "frequencies must be strictly ascending: {frequencies:?}"
        )));
    }
    Ok(())
}

/// Generative ground truth of one experiment sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    grid: GridSpec,
    buildings: BinaryMap,
    transmitters: Vec<Transmitter>,
    frequencies_mhz: Vec<f64>,
    target_index: usize,
}

impl Scene {
    pub fn new(
        grid: GridSpec,
        buildings: BinaryMap,
        transmitters: Vec<Transmitter>,
        frequencies_mhz: Vec<f64>,
        target_index: usize,
    ) -> Result<Self> {
        if buildings.side() != grid.cells_per_side() {
            return Err(Error::ShapeMismatch(format!(
                "building map is {0}x{0}, grid is {1}x{1}",
                buildings.side(),
                grid.cells_per_side()
            )));
        }
        validate_frequencies(&frequencies_mhz)?;
        if target_index >= frequencies_mhz.len() {
            return Err(Error::Config(format!(
                "target index {target_index} out of range for {} frequencies",
                frequencies_mhz.len()
            )));
        }
        if transmitters.is_empty() {
            return Err(Error::Infeasible("scene has no transmitter".into()));
        }
        for tx in &transmitters {
            if !grid.contains(tx.cell) {
                return Err(Error::CellOutOfRange {
                    i: tx.cell.i,
                    j: tx.cell.j,
                    n: grid.cells_per_side(),
                });
            }
            if buildings.is_set(tx.cell) {
                return Err(Error::Infeasible(format!(
                    "transmitter at {:?} sits inside a building",
                    tx.cell
                )));
            }
            if let Emission::Single(k) = tx.emission {
                if k >= frequencies_mhz.len() {
                    return Err(Error::Config(format!("emission index {k} out of range")));
                }
            }
        }
        Ok(Self { grid, buildings, transmitters, frequencies_mhz, target_index })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn buildings(&self) -> &BinaryMap {
        &self.buildings
    }

    pub fn transmitters(&self) -> &[Transmitter] {
        &self.transmitters
    }

    pub fn frequencies_mhz(&self) -> &[f64] {
        &self.frequencies_mhz
    }

    pub fn layer_count(&self) -> usize {
        self.frequencies_mhz.len()
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn free_cells(&self) -> Vec<Cell> {
        self.buildings.zeros_iter().collect()
    }
}

/// Axis-aligned rectangle in meters, `[x0, x1) × [y0, y1)`; x runs along rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

/// Marks every cell whose center lies inside at least one rectangle.
pub fn rasterize(grid: &GridSpec, rects: &[Rect]) -> BinaryMap {
    let mut map = BinaryMap::zeros(grid.cells_per_side());
    for cell in grid.cells() {
        let center = grid.center_unchecked(cell);
        if rects.iter().any(|r| r.contains(center)) {
            map.set(cell, true);
        }
    }
    map
}

/// Draws a scene from `config`. Pure in `(config, seed)`.
pub fn generate_scene(config: &SceneConfig, seed: u64) -> Result<Scene> {
    config.validate()?;
    let grid = config.grid()?;
    let target_index = config.target_index()?;
    let mut rng = rng::stream(seed, Purpose::Scene, 0);

    let d = grid.interval();
    let w = grid.side_meters();
    let side_lo = (config.building_side_min_cells * d).min(w);
    let side_hi = (config.building_side_max_cells * d).min(w);
    let building_count = rng.random_range(config.buildings_min..=config.buildings_max);
    let rects: Vec<Rect> = (0..building_count)
        .map(|_| {
            let sx = rng.random_range(side_lo..=side_hi);
            let sy = rng.random_range(side_lo..=side_hi);
            let x0 = rng.random_range(0.0..=w - sx);
            let y0 = rng.random_range(0.0..=w - sy);
            Rect { x0, y0, x1: x0 + sx, y1: y0 + sy }
        })
        .collect();
    let buildings = rasterize(&grid, &rects);

    let free: Vec<Cell> = buildings.zeros_iter().collect();
    let tx_count = rng.random_range(config.transmitters_min..=config.transmitters_max);
    if free.len() < tx_count {
        return Err(Error::Infeasible(format!(
            "{tx_count} transmitters requested but only {} free cells",
            free.len()
        )));
    }
    let layers = config.frequencies_mhz.len();
    let transmitters = sample(&mut rng, free.len(), tx_count)
        .into_iter()
        .map(|idx| {
            let power_dbm = rng.random_range(config.power_min_dbm..=config.power_max_dbm);
            let emission = match config.frequency_mode {
                FrequencyMode::Single => Emission::Single(rng.random_range(0..layers)),
                FrequencyMode::Broadband => Emission::Broadband,
            };
            Transmitter { cell: free[idx], power_dbm, emission }
        })
        .collect();

    Scene::new(grid, buildings, transmitters, config.frequencies_mhz.clone(), target_index)
}
