use rayon::prelude::*;

use super::SampleList;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Map2};

/// Inverse-distance-weighted interpolation with weights `d^-power`, distances
/// between cell centers in meters. Exact at sample cells.
pub fn idw_reconstruct(samples: &SampleList, grid: &GridSpec, power: f64) -> Result<Map2> {
    if samples.is_empty() {
        return Err(Error::NotEnoughSamples { needed: 1, got: 0 });
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidArgument(format!("IDW power must be positive, got {power}")));
    }
    samples.check_grid(grid)?;
    let n = grid.cells_per_side();
    let lookup = samples.index_map(n);
    let cells: Vec<_> = grid.cells().collect();
    let values = cells
        .par_iter()
        .map(|&cell| {
            if let Some(idx) = lookup[cell.flat(n)] {
                return samples.entries()[idx].1;
            }
            let (mut num, mut den) = (0.0, 0.0);
            for &(at, value) in samples.entries() {
                let w = grid.distance(cell, at).powf(-power);
                num += w * value;
                den += w;
            }
            num / den
        })
        .collect();
    Map2::from_vec(n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;

    #[test]
    fn single_sample_gives_constant_map() {
        let grid = GridSpec::new(32.0, 8).unwrap();
        let samples = SampleList::new(vec![(Cell::new(3, 5), -71.5)]).unwrap();
        let map = idw_reconstruct(&samples, &grid, 2.0).unwrap();
        assert!(map.values().iter().all(|&v| (v - -71.5).abs() < 1e-12));
    }

    #[test]
    fn equidistant_pair_averages() {
        let grid = GridSpec::new(5.0, 5).unwrap();
        let samples = SampleList::new(vec![(Cell::new(2, 0), -60.0), (Cell::new(2, 4), -80.0)]).unwrap();
        let map = idw_reconstruct(&samples, &grid, 2.0).unwrap();
        assert!((map.get(Cell::new(2, 2)) - -70.0).abs() < 1e-12);
        assert_eq!(map.get(Cell::new(2, 0)), -60.0);
    }

    #[test]
    fn empty_samples_rejected() {
        let grid = GridSpec::new(8.0, 8).unwrap();
        let empty = SampleList::new(vec![]).unwrap();
        assert!(idw_reconstruct(&empty, &grid, 2.0).is_err());
    }
}
