//! RMSE in the dB domain, per layer and over the whole cube.

use crate::cube::FrequencySpaceCube;
use crate::error::{Error, Result};
use crate::grid::BinaryMap;

/// Which cells enter the error sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskPolicy {
    #[default]
    AllCells,
    ExcludeBuildings,
}

impl MaskPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskPolicy::AllCells => "all_cells",
            MaskPolicy::ExcludeBuildings => "exclude_buildings",
        }
    }
}

impl std::str::FromStr for MaskPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_cells" | "all-cells" | "all" => Ok(MaskPolicy::AllCells),
            "exclude_buildings" | "exclude-buildings" => Ok(MaskPolicy::ExcludeBuildings),
            other => Err(Error::InvalidArgument(format!(
                "unknown mask policy {other:?} (expected all_cells or exclude_buildings)"
            ))),
        }
    }
}

/// Sum of squared errors and the number of cells behind it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorSum {
    pub sse: f64,
    pub cells: usize,
}

impl ErrorSum {
    pub fn rmse(&self) -> f64 {
        if self.cells == 0 {
            f64::NAN
        } else {
            (self.sse / self.cells as f64).sqrt()
        }
    }

    pub fn add(&mut self, other: ErrorSum) {
        self.sse += other.sse;
        self.cells += other.cells;
    }
}

/// Error sums per layer, possibly accumulated over several scenes.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mask: MaskPolicy,
    pub layers: Vec<ErrorSum>,
    pub scene_count: usize,
}

impl EvalReport {
    pub fn empty(mask: MaskPolicy, layers: usize) -> Self {
        Self { mask, layers: vec![ErrorSum::default(); layers], scene_count: 0 }
    }

    pub fn layer_rmse(&self, layer: usize) -> f64 {
        self.layers[layer].rmse()
    }

    /// Root of the cell-count-weighted mean squared error over all layers.
    pub fn overall(&self) -> ErrorSum {
        let mut total = ErrorSum::default();
        for layer in &self.layers {
            total.add(*layer);
        }
        total
    }

    pub fn overall_rmse(&self) -> f64 {
        self.overall().rmse()
    }

    pub fn merge(&mut self, other: &EvalReport) -> Result<()> {
        if other.layers.len() != self.layers.len() || other.mask != self.mask {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge a {}-layer {} report into a {}-layer {} report",
                other.layers.len(),
                other.mask.as_str(),
                self.layers.len(),
                self.mask.as_str()
            )));
        }
        for (mine, theirs) in self.layers.iter_mut().zip(&other.layers) {
            mine.add(*theirs);
        }
        self.scene_count += other.scene_count;
        Ok(())
    }
}

/// RMSE of `estimate` against `truth`. `city` is consulted only when the
/// policy excludes buildings.
pub fn rmse(
    estimate: &FrequencySpaceCube,
    truth: &FrequencySpaceCube,
    mask: MaskPolicy,
    city: &BinaryMap,
) -> Result<EvalReport> {
    if !estimate.same_shape(truth) {
        return Err(Error::ShapeMismatch(format!(
            "estimate is {0}x{0}x{1}, truth is {2}x{2}x{3}",
            estimate.side(),
            estimate.layer_count(),
            truth.side(),
            truth.layer_count()
        )));
    }
    if mask == MaskPolicy::ExcludeBuildings && city.side() != truth.side() {
        return Err(Error::ShapeMismatch(format!(
            "city map is {0}x{0}, cube is {1}x{1}",
            city.side(),
            truth.side()
        )));
    }
    let include = |idx: usize| match mask {
        MaskPolicy::AllCells => true,
        MaskPolicy::ExcludeBuildings => city.as_bytes()[idx] == 0,
    };
    let layers = (0..truth.layer_count())
        .map(|k| {
            let mut sum = ErrorSum::default();
            for (idx, (e, p)) in estimate.layer(k).iter().zip(truth.layer(k)).enumerate() {
                if include(idx) {
                    sum.sse += (e - p).powi(2);
                    sum.cells += 1;
                }
            }
            sum
        })
        .collect();
    Ok(EvalReport { mask, layers, scene_count: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_cubes_have_zero_error() {
        let p = FrequencySpaceCube::filled(4, 2, -70.0);
        let report = rmse(&p, &p, MaskPolicy::AllCells, &BinaryMap::zeros(4)).unwrap();
        assert_eq!(report.overall_rmse(), 0.0);
    }

    #[test]
    fn constant_offset() {
        let p = FrequencySpaceCube::filled(4, 2, -70.0);
        let e = FrequencySpaceCube::filled(4, 2, -68.0);
        let report = rmse(&e, &p, MaskPolicy::AllCells, &BinaryMap::zeros(4)).unwrap();
        assert!((report.overall_rmse() - 2.0).abs() < 1e-12);
        assert!((report.layer_rmse(1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn building_mask_drops_cells() {
        let p = FrequencySpaceCube::filled(2, 1, 0.0);
        let mut e = p.clone();
        e.layer_mut(0).copy_from_slice(&[10.0, 0.0, 0.0, 0.0]);
        let city = BinaryMap::from_vec(2, vec![1, 0, 0, 0]).unwrap();
        let masked = rmse(&e, &p, MaskPolicy::ExcludeBuildings, &city).unwrap();
        assert_eq!(masked.overall_rmse(), 0.0);
        assert_eq!(masked.overall().cells, 3);
        let all = rmse(&e, &p, MaskPolicy::AllCells, &city).unwrap();
        assert!((all.overall_rmse() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = FrequencySpaceCube::filled(4, 2, 0.0);
        let b = FrequencySpaceCube::filled(4, 3, 0.0);
        assert!(rmse(&a, &b, MaskPolicy::AllCells, &BinaryMap::zeros(4)).is_err());
    }

    #[test]
    fn mask_policy_parses() {
        assert_eq!("exclude_buildings".parse::<MaskPolicy>().unwrap(), MaskPolicy::ExcludeBuildings);
        assert_eq!("all_cells".parse::<MaskPolicy>().unwrap(), MaskPolicy::AllCells);
        assert!("some".parse::<MaskPolicy>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn symmetric_and_shift_invariant(
            values in proptest::collection::vec(-150.0f64..0.0, 32),
            shift in -50.0f64..50.0,
        ) {
            let e = FrequencySpaceCube::from_vec(4, 1, values[..16].to_vec()).unwrap();
            let p = FrequencySpaceCube::from_vec(4, 1, values[16..].to_vec()).unwrap();
            let city = BinaryMap::zeros(4);
            let ab = rmse(&e, &p, MaskPolicy::AllCells, &city).unwrap().overall_rmse();
            let ba = rmse(&p, &e, MaskPolicy::AllCells, &city).unwrap().overall_rmse();
            proptest::prop_assert_eq!(ab, ba);
            let shifted = |c: &FrequencySpaceCube| {
                FrequencySpaceCube::from_vec(4, 1, c.values().iter().map(|v| v + shift).collect()).unwrap()
            };
            let moved = rmse(&shifted(&e), &shifted(&p), MaskPolicy::AllCells, &city).unwrap().overall_rmse();
            proptest::prop_assert!((moved - ab).abs() < 1e-9);
        }
    }
}
