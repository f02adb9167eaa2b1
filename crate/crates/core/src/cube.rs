//! The joint frequency-space cube: one N×N map per frequency, stacked in
//! ascending frequency order. Storage is layer-major, then row-major.

use crate::error::{Error, Result};
use crate::grid::{Cell, Map2};

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpaceCube {
    n: usize,
    layers: usize,
    values: Vec<f64>,
}

impl FrequencySpaceCube {
    pub fn filled(n: usize, layers: usize, value: f64) -> Self {
        Self { n, layers, values: vec![value; n * n * layers] }
    }

    pub fn from_vec(n: usize, layers: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n * layers {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {n}x{n}x{layers} cube",
                values.len()
            )));
        }
        Ok(Self { n, layers, values })
    }

    pub fn from_layers(layers: Vec<Map2>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::ShapeMismatch("cube needs at least one layer".into()));
        };
        let n = first.side();
        if let Some(bad) = layers.iter().find(|m| m.side() != n) {
            return Err(Error::ShapeMismatch(format!(
                "layer of side {} in a cube of side {n}",
                bad.side()
            )));
        }
        let count = layers.len();
        let values = layers.into_iter().flat_map(Map2::into_values).collect();
        Ok(Self { n, layers: count, values })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn layer_count(&self) -> usize {
        self.layers
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n == other.n && self.layers == other.layers
    }

    pub fn get(&self, layer: usize, cell: Cell) -> f64 {
        self.values[self.offset(layer) + cell.flat(self.n)]
    }

    pub fn set(&mut self, layer: usize, cell: Cell, value: f64) {
        let idx = self.offset(layer) + cell.flat(self.n);
        self.values[idx] = value;
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        let start = self.offset(layer);
        &self.values[start..start + self.n * self.n]
    }

    pub fn layer_mut(&mut self, layer: usize) -> &mut [f64] {
        let start = self.offset(layer);
        let len = self.n * self.n;
        &mut self.values[start..start + len]
    }

    pub fn layer_map(&self, layer: usize) -> Map2 {
        Map2::from_vec(self.n, self.layer(layer).to_vec()).expect("layer has n*n values")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rounds every value through `f32`, the on-disk precision.
    pub fn quantize_f32(&mut self) {
        for v in &mut self.values {
            *v = *v as f32 as f64;
        }
    }

    fn offset(&self, layer: usize) -> usize {
        assert!(layer < self.layers, "layer {layer} of {}", self.layers);
        layer * self.n * self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_major_layout() {
        let cube = FrequencySpaceCube::from_vec(2, 2, (0..8).map(f64::from).collect()).unwrap();
        assert_eq!(cube.get(0, Cell::new(0, 1)), 1.0);
        assert_eq!(cube.get(0, Cell::new(1, 0)), 2.0);
        assert_eq!(cube.get(1, Cell::new(0, 0)), 4.0);
        assert_eq!(cube.layer(1), &[4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn from_layers_checks_sides() {
        let a = Map2::filled(2, 1.0);
        let b = Map2::filled(3, 1.0);
        assert!(FrequencySpaceCube::from_layers(vec![a.clone(), b]).is_err());
        assert!(FrequencySpaceCube::from_layers(vec![]).is_err());
        let cube = FrequencySpaceCube::from_layers(vec![a.clone(), a]).unwrap();
        assert_eq!(cube.layer_count(), 2);
    }
}
