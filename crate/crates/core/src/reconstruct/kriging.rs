//! Ordinary kriging on a moving neighborhood of the nearest samples.

use rayon::prelude::*;

use super::{nearest, SampleList, VariogramModel};
use crate::error::{Error, Result};
use crate::grid::{Cell, GridSpec, Map2};

/// Diagonal jitter applied when the kriging matrix is numerically singular.
const JITTER: f64 = 1e-10;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Weights of one kriging prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct KrigingWeights {
    /// Sample indices, nearest first.
    pub neighbors: Vec<usize>,
    pub weights: Vec<f64>,
    pub lagrange: f64,
    /// The solve needed diagonal jitter.
    pub jittered: bool,
}

impl KrigingWeights {
    pub fn predict(&self, samples: &SampleList) -> f64 {
        self.neighbors
            .iter()
            .zip(&self.weights)
            .map(|(&i, w)| w * samples.entries()[i].1)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrigingMap {
    pub map: Map2,
    /// Cells whose system needed jitter.
    pub jittered_cells: usize,
}

pub fn kriging_weights(
    samples: &SampleList,
    grid: &GridSpec,
    model: &VariogramModel,
    neighborhood: usize,
    query: Cell,
) -> Result<KrigingWeights> {
    check_inputs(samples, grid, neighborhood)?;
    if !grid.contains(query) {
        return Err(Error::CellOutOfRange { i: query.i, j: query.j, n: grid.cells_per_side() });
    }
    let mut scratch = Vec::new();
    let mut system = System::default();
    Ok(solve_at(samples, grid, model, neighborhood.min(samples.len()), query, &mut scratch, &mut system))
}

pub fn kriging_reconstruct(
    samples: &SampleList,
    grid: &GridSpec,
    model: &VariogramModel,
    neighborhood: usize,
) -> Result<KrigingMap> {
    check_inputs(samples, grid, neighborhood)?;
    let m = neighborhood.min(samples.len());
    let cells: Vec<Cell> = grid.cells().collect();
    let solved: Vec<(f64, bool)> = cells
        .par_iter()
        .map_init(
            || (Vec::new(), System::default()),
            |(scratch, system), &cell| {
                let w = solve_at(samples, grid, model, m, cell, scratch, system);
                (w.predict(samples), w.jittered)
            },
        )
        .collect();
    let jittered_cells = solved.iter().filter(|(_, j)| *j).count();
    let map = Map2::from_vec(grid.cells_per_side(), solved.into_iter().map(|(v, _)| v).collect())?;
    Ok(KrigingMap { map, jittered_cells })
}

fn check_inputs(samples: &SampleList, grid: &GridSpec, neighborhood: usize) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::NotEnoughSamples { needed: 2, got: samples.len() });
    }
    if neighborhood < 2 {
        return Err(Error::InvalidArgument(format!(
            "kriging neighborhood must hold at least 2 samples, got {neighborhood}"
        )));
    }
    samples.check_grid(grid)
}

#[derive(Default)]
struct System {
    matrix: Vec<f64>,
    rhs: Vec<f64>,
}

fn solve_at(
    samples: &SampleList,
    grid: &GridSpec,
    model: &VariogramModel,
    m: usize,
    query: Cell,
    scratch: &mut Vec<(u64, Cell, usize)>,
    system: &mut System,
) -> KrigingWeights {
    let neighbors = nearest(samples, query, m, scratch);
    let size = m + 1;
    let cell_of = |i: usize| samples.entries()[neighbors[i]].0;

    let build = |system: &mut System, jitter: f64| {
        system.matrix.clear();
        system.matrix.resize(size * size, 0.0);
        system.rhs.clear();
        system.rhs.resize(size, 0.0);
        for r in 0..m {
            for c in 0..m {
                let g = if r == c { jitter } else { model.gamma(grid.distance(cell_of(r), cell_of(c))) };
                system.matrix[r * size + c] = g;
            }
            system.matrix[r * size + m] = 1.0;
            system.matrix[m * size + r] = 1.0;
            system.rhs[r] = model.gamma(grid.distance(cell_of(r), query));
        }
        system.rhs[m] = 1.0;
    };

    build(system, 0.0);
    let mut jittered = false;
    if !lu_solve(&mut system.matrix, &mut system.rhs, size) {
        jittered = true;
        build(system, JITTER);
        // Jitter turns the block into a regular matrix for distinct cells.
        let solved = lu_solve(&mut system.matrix, &mut system.rhs, size);
        debug_assert!(solved, "kriging system singular even after jitter");
    }
    let weights = system.rhs[..m].to_vec();
    let lagrange = system.rhs[m];
    let sum: f64 = weights.iter().sum();
    debug_assert!(
        (sum - 1.0).abs() <= WEIGHT_SUM_TOLERANCE,
        "kriging weights sum to {sum} at {query:?}"
    );
    KrigingWeights { neighbors, weights, lagrange, jittered }
}

/// Solves `a · x = b` in place by Gaussian elimination with partial pivoting;
/// `b` receives `x`. Returns false when a pivot is negligible relative to the
/// largest entry of `a`.
fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tiny = scale * 1e-13;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .expect("non-empty range");
        if a[pivot_row * n + col].abs() <= tiny {
            return false;
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[row * n + c] -= factor * a[col * n + c];
            }
            b[row] -= factor * b[col];
        }
    }
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row * n + c] * b[c]).sum();
        b[row] = (b[row] - tail) / a[row * n + row];
    }
    true
}
