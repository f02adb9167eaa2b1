//! Discretization of the square target area and per-cell 2D maps.

use crate::error::{Error, Result};

/// A square area of `side_meters` split into `cells_per_side`² equal cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    side_meters: f64,
    cells_per_side: usize,
}

impl GridSpec {
    pub fn new(side_meters: f64, cells_per_side: usize) -> Result<Self> {
        if !(side_meters.is_finite() && side_meters > 0.0) {
            return Err(Error::Config(format!(
                "side length must be positive, got {side_meters}"
            )));
        }
        if cells_per_side == 0 {
            return Err(Error::Config("grid needs at least one cell per side".into()));
        }
        let grid = Self { side_meters, cells_per_side };
        if grid.interval() * cells_per_side as f64 != side_meters {
            return Err(Error::Config(format!(
                "side length {side_meters} m is not evenly divisible into {cells_per_side} cells"
            )));
        }
        Ok(grid)
    }

    pub fn side_meters(&self) -> f64 {
        self.side_meters
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side * self.cells_per_side
    }

    /// Cell edge length Δd in meters.
    pub fn interval(&self) -> f64 {
        self.side_meters / self.cells_per_side as f64
    }

    /// Center of cell `(i, j)` in meters: `((i + 0.5)Δd, (j + 0.5)Δd)`.
    pub fn cell_center(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let n = self.cells_per_side;
        if i >= n || j >= n {
            return Err(Error::CellOutOfRange { i, j, n });
        }
        Ok(self.center_unchecked(Cell::new(i, j)))
    }

    pub(crate) fn center_unchecked(&self, cell: Cell) -> (f64, f64) {
        let d = self.interval();
        ((cell.i as f64 + 0.5) * d, (cell.j as f64 + 0.5) * d)
    }

    /// Euclidean distance in meters between two cell centers.
    pub fn distance(&self, a: Cell, b: Cell) -> f64 {
        (a.squared_cell_distance(b) as f64).sqrt() * self.interval()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.i < self.cells_per_side && cell.j < self.cells_per_side
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let n = self.cells_per_side;
        (0..n).flat_map(move |i| (0..n).map(move |j| Cell::new(i, j)))
    }
}

/// Grid index `(i, j)`: `i` is the row, `j` the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// Squared center-to-center distance in cell units. Exact, so usable for ordering.
    pub fn squared_cell_distance(self, other: Cell) -> u64 {
        let di = self.i.abs_diff(other.i) as u64;
        let dj = self.j.abs_diff(other.j) as u64;
        di * di + dj * dj
    }

    pub(crate) fn flat(self, n: usize) -> usize {
        self.i * n + self.j
    }
}

/// Row-major N×N map of real values.
#[derive(Debug, Clone, PartialEq)]
pub struct Map2 {
    n: usize,
    values: Vec<f64>,
}

impl Map2 {
    pub fn filled(n: usize, value: f64) -> Self {
        Self { n, values: vec![value; n * n] }
    }

    pub fn from_vec(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {n}x{n} map",
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.values[cell.flat(self.n)]
    }

    pub fn set(&mut self, cell: Cell, value: f64) {
        self.values[cell.flat(self.n)] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Row-major N×N map restricted to {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap {
    n: usize,
    values: Vec<u8>,
}

impl BinaryMap {
    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![0; n * n] }
    }

    pub fn from_vec(n: usize, values: Vec<u8>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {n}x{n} binary map",
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidArgument(format!(
                "binary map contains value {bad}"
            )));
        }
        Ok(Self { n, values })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn is_set(&self, cell: Cell) -> bool {
        self.values[cell.flat(self.n)] == 1
    }

    pub fn set(&mut self, cell: Cell, on: bool) {
        self.values[cell.flat(self.n)] = on as u8;
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.values
    }

    pub fn count_ones(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1).count()
    }

    /// Cells equal to 1, in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = Cell> + '_ {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(move |(idx, _)| Cell::new(idx / n, idx % n))
    }

    /// Cells equal to 0, in row-major order.
    pub fn zeros_iter(&self) -> impl Iterator<Item = Cell> + '_ {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(move |(idx, _)| Cell::new(idx / n, idx % n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_four_meter_cells() {
        let grid = GridSpec::new(256.0, 64).unwrap();
        assert_eq!(grid.interval(), 4.0);
    }

    #[test]
    fn corner_cell_centers() {
        let grid = GridSpec::new(256.0, 64).unwrap();
        assert_eq!(grid.cell_center(0, 0).unwrap(), (2.0, 2.0));
        assert_eq!(grid.cell_center(63, 63).unwrap(), (254.0, 254.0));
    }

    #[test]
    fn out_of_range_center_is_rejected() {
        let grid = GridSpec::new(256.0, 64).unwrap();
        assert!(matches!(
            grid.cell_center(64, 0),
            Err(Error::CellOutOfRange { i: 64, j: 0, n: 64 })
        ));
        assert!(grid.cell_center(0, 64).is_err());
    }

    #[test]
    fn rejects_uneven_division() {
        assert!(GridSpec::new(100.0, 11).is_err());
        assert!(GridSpec::new(0.0, 4).is_err());
        assert!(GridSpec::new(16.0, 0).is_err());
    }

    #[test]
    fn binary_map_rejects_non_binary() {
        assert!(BinaryMap::from_vec(2, vec![0, 1, 2, 0]).is_err());
        assert!(BinaryMap::from_vec(2, vec![0, 1, 1]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn centers_stay_inside_area(n in 1usize..128, scale in 1u32..8, i in 0usize..128, j in 0usize..128) {
            let w = (n as u32 * scale) as f64;
            let grid = GridSpec::new(w, n).unwrap();
            let (i, j) = (i % n, j % n);
            let (x, y) = grid.cell_center(i, j).unwrap();
            proptest::prop_assert!(x > 0.0 && x < w);
            proptest::prop_assert!(y > 0.0 && y < w);
        }
    }
}
