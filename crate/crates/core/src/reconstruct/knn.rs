use rayon::prelude::*;

use super::{nearest, SampleList};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Map2};

/// Unweighted mean of the `k` nearest samples (clamped to the sample count).
pub fn knn_reconstruct(samples: &SampleList, grid: &GridSpec, k: usize) -> Result<Map2> {
    if samples.is_empty() {
        return Err(Error::NotEnoughSamples { needed: 1, got: 0 });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    samples.check_grid(grid)?;
    let k = k.min(samples.len());
    let cells: Vec<_> = grid.cells().collect();
    let values = cells
        .par_iter()
        .map_init(Vec::new, |scratch, &cell| {
            let picked = nearest(samples, cell, k, scratch);
            picked.iter().map(|&i| samples.entries()[i].1).sum::<f64>() / k as f64
        })
        .collect();
    Map2::from_vec(grid.cells_per_side(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;

    fn samples() -> SampleList {
        SampleList::new(vec![
            (Cell::new(0, 0), -50.0),
            (Cell::new(3, 7), -90.0),
            (Cell::new(6, 2), -70.0),
            (Cell::new(7, 7), -65.0),
        ])
        .unwrap()
    }

    #[test]
    fn all_neighbors_gives_global_mean() {
        let grid = GridSpec::new(8.0, 8).unwrap();
        let map = knn_reconstruct(&samples(), &grid, 4).unwrap();
        assert!(map.values().iter().all(|&v| (v - -68.75).abs() < 1e-12));
        // oversized k clamps
        assert_eq!(knn_reconstruct(&samples(), &grid, 40).unwrap(), map);
    }

    #[test]
    fn one_neighbor_is_exact_at_samples() {
        let grid = GridSpec::new(8.0, 8).unwrap();
        let map = knn_reconstruct(&samples(), &grid, 1).unwrap();
        for &(cell, v) in samples().entries() {
            assert_eq!(map.get(cell), v);
        }
    }

    #[test]
    fn rejects_empty_and_zero_k() {
        let grid = GridSpec::new(8.0, 8).unwrap();
        assert!(knn_reconstruct(&SampleList::new(vec![]).unwrap(), &grid, 3).is_err());
        assert!(knn_reconstruct(&samples(), &grid, 0).is_err());
    }
}
