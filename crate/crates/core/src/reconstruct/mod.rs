//! Classical single-layer estimators and cross-frequency completion.

mod completion;
mod idw;
mod knn;
mod kriging;
mod variogram;

pub use completion::complete_target_layer;
pub use idw::idw_reconstruct;
pub use knn::knn_reconstruct;
pub use kriging::{kriging_reconstruct, kriging_weights, KrigingMap, KrigingWeights};
pub use variogram::{
    empirical_variogram, fit_variogram, EmpiricalBin, VariogramFit, VariogramModel,
    MIN_SILL,
};

use crate::error::{Error, Result};
use crate::grid::{BinaryMap, Cell, GridSpec};

/// Observations of one frequency layer at distinct cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleList {
    entries: Vec<(Cell, f64)>,
}

impl SampleList {
    pub fn new(mut entries: Vec<(Cell, f64)>) -> Result<Self> {
        if let Some((cell, _)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at {cell:?}"
            )));
        }
        entries.sort_by_key(|(cell, _)| *cell);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(format!(
                "duplicate sample at {:?}",
                w[0].0
            )));
        }
        Ok(Self { entries })
    }

    /// Samples of a layer at the cells set in `mask`.
    pub fn from_layer(layer: &[f64], mask: &BinaryMap) -> Result<Self> {
        let n = mask.side();
        if layer.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "layer of {} values against a {n}x{n} mask",
                layer.len()
            )));
        }
        Self::new(mask.ones().map(|c| (c, layer[c.flat(n)])).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by cell.
    pub fn entries(&self) -> &[(Cell, f64)] {
        &self.entries
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        match self.entries.iter().find(|(c, _)| !grid.contains(*c)) {
            Some((c, _)) => Err(Error::CellOutOfRange { i: c.i, j: c.j, n: grid.cells_per_side() }),
            None => Ok(()),
        }
    }

    /// Dense cell → sample index lookup.
    fn index_map(&self, n: usize) -> Vec<Option<usize>> {
        let mut lookup = vec![None; n * n];
        for (idx, (cell, _)) in self.entries.iter().enumerate() {
            lookup[cell.flat(n)] = Some(idx);
        }
        lookup
    }
}

/// Indices of the `k` samples nearest to `query`, closest first. Ties in
/// distance go to the lexicographically smaller sample cell.
pub(crate) fn nearest(samples: &SampleList, query: Cell, k: usize, scratch: &mut Vec<(u64, Cell, usize)>) -> Vec<usize> {
    scratch.clear();
    scratch.extend(
        samples
            .entries()
            .iter()
            .enumerate()
            .map(|(idx, (cell, _))| (query.squared_cell_distance(*cell), *cell, idx)),
    );
    let k = k.min(scratch.len());
    if k == 0 {
        return Vec::new();
    }
    if k < scratch.len() {
        scratch.select_nth_unstable(k - 1);
        scratch.truncate(k);
    }
    scratch.sort_unstable();
    scratch.iter().map(|&(_, _, idx)| idx).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_list_rejects_duplicates_and_nan() {
        let c = Cell::new(1, 1);
        assert!(SampleList::new(vec![(c, 1.0), (c, 2.0)]).is_err());
        assert!(SampleList::new(vec![(c, f64::NAN)]).is_err());
    }

    #[test]
    fn nearest_breaks_ties_lexicographically() {
        let samples = SampleList::new(vec![
            (Cell::new(2, 3), 0.0),
            (Cell::new(1, 2), 0.0),
            (Cell::new(2, 1), 0.0),
            (Cell::new(3, 2), 0.0),
            (Cell::new(0, 0), 0.0),
        ])
        .unwrap();
        let mut scratch = Vec::new();
        let picked = nearest(&samples, Cell::new(2, 2), 3, &mut scratch);
        let cells: Vec<Cell> = picked.iter().map(|&i| samples.entries()[i].0).collect();
        assert_eq!(cells, vec![Cell::new(1, 2), Cell::new(2, 1), Cell::new(2, 3)]);
    }
}
