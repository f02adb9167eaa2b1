//! Empirical semivariogram and exponential model fit.
//!
//! The fit is a grid search over the practical range `a ∈ {Δd, 2Δd, …, W/2}`.
//! For each candidate range the model is linear in nugget and sill, so those
//! come from a pair-count-weighted least-squares solve restricted to
//! `nugget ≥ 0`, `sill ≥ MIN_SILL`.

use super::SampleList;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Lower bound on the fitted sill, dB².
pub const MIN_SILL: f64 = 1e-6;

/// `γ(h) = nugget + sill · (1 − exp(−3h / range))` for `h > 0`, `γ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramModel {
    pub nugget: f64,
    pub sill: f64,
    pub range: f64,
}

impl VariogramModel {
    pub fn exponential(nugget: f64, sill: f64, range: f64) -> Result<Self> {
        if !(nugget >= 0.0 && sill > 0.0 && range > 0.0) || !(nugget + sill + range).is_finite() {
            return Err(Error::InvalidArgument(format!(
                "variogram needs nugget >= 0, sill > 0, range > 0; got ({nugget}, {sill}, {range})"
            )));
        }
        Ok(Self { nugget, sill, range })
    }

    /// Semivariance used in the kriging system; zero at zero lag.
    pub fn gamma(&self, h: f64) -> f64 {
        if h <= 0.0 {
            0.0
        } else {
            self.nugget + self.sill * structure(h, self.range)
        }
    }

    pub fn with_nugget(self, nugget: f64) -> Self {
        Self { nugget, ..self }
    }

    /// Nugget-free model with the minimum sill at the shortest range.
    pub fn degenerate(grid: &GridSpec) -> Self {
        Self { nugget: 0.0, sill: MIN_SILL, range: grid.interval() }
    }
}

fn structure(h: f64, range: f64) -> f64 {
    1.0 - (-3.0 * h / range).exp()
}

/// One lag bin: mean pair distance, semivariance estimate, pair count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalBin {
    pub lag: f64,
    pub gamma: f64,
    pub pairs: usize,
}

/// Classical (Matheron) estimator. Pairs farther apart than `max_lag` are
/// dropped; the rest fall in bins `[b·w, (b+1)·w)`. Empty bins are omitted.
pub fn empirical_variogram(
    samples: &SampleList,
    grid: &GridSpec,
    bin_width: f64,
    max_lag: f64,
) -> Result<Vec<EmpiricalBin>> {
    if samples.len() < 2 {
        return Err(Error::NotEnoughSamples { needed: 2, got: samples.len() });
    }
    if !(bin_width > 0.0 && max_lag > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bin width {bin_width} and max lag {max_lag} must be positive"
        )));
    }
    samples.check_grid(grid)?;
    let bins = (max_lag / bin_width).floor() as usize + 1;
    let mut dist_sum = vec![0.0; bins];
    let mut sq_sum = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    let entries = samples.entries();
    for (a, &(ca, za)) in entries.iter().enumerate() {
        for &(cb, zb) in &entries[a + 1..] {
            let h = grid.distance(ca, cb);
            if h > max_lag {
                continue;
            }
            let b = (h / bin_width).floor() as usize;
            dist_sum[b] += h;
            sq_sum[b] += (za - zb).powi(2);
            counts[b] += 1;
        }
    }
    Ok((0..bins)
        .filter(|&b| counts[b] > 0)
        .map(|b| EmpiricalBin {
            lag: dist_sum[b] / counts[b] as f64,
            gamma: sq_sum[b] / (2.0 * counts[b] as f64),
            pairs: counts[b],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramFit {
    pub model: VariogramModel,
    pub weighted_sse: f64,
    /// Every bin had zero semivariance; `model` is the fallback.
    pub degenerate: bool,
}

/// Pair-count-weighted SSE of `model` against `empirical`.
pub fn weighted_sse(empirical: &[EmpiricalBin], model: &VariogramModel) -> f64 {
    empirical
        .iter()
        .map(|b| b.pairs as f64 * (b.gamma - model.gamma(b.lag)).powi(2))
        .sum()
}

pub fn fit_variogram(empirical: &[EmpiricalBin], grid: &GridSpec) -> Result<VariogramFit> {
    if empirical.len() < 3 {
        return Err(Error::TooFewBins(empirical.len()));
    }
    if empirical.iter().all(|b| b.gamma == 0.0) {
        let model = VariogramModel::degenerate(grid);
        return Ok(VariogramFit { model, weighted_sse: weighted_sse(empirical, &model), degenerate: true });
    }
    let step = grid.interval();
    let candidates = ((grid.side_meters() / 2.0) / step).floor().max(1.0) as usize;
    let mut best: Option<VariogramFit> = None;
    for k in 1..=candidates {
        let range = k as f64 * step;
        let model = fit_linear_part(empirical, range);
        let sse = weighted_sse(empirical, &model);
        if best.is_none_or(|b| sse < b.weighted_sse) {
            best = Some(VariogramFit { model, weighted_sse: sse, degenerate: false });
        }
    }
    Ok(best.expect("at least one candidate range"))
}

/// Weighted least squares for nugget and sill at a fixed range. The objective
/// is a convex quadratic, so the constrained optimum is the unconstrained one
/// when feasible, otherwise the best clamped optimum along a boundary.
fn fit_linear_part(empirical: &[EmpiricalBin], range: f64) -> VariogramModel {
    let (mut sw, mut sg, mut sgg, mut sy, mut sgy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for b in empirical {
        let w = b.pairs as f64;
        let g = structure(b.lag, range);
        sw += w;
        sg += w * g;
        sgg += w * g * g;
        sy += w * b.gamma;
        sgy += w * g * b.gamma;
    }
    let mut candidates = Vec::with_capacity(4);
    let det = sw * sgg - sg * sg;
    if det.abs() > 1e-12 * sw * sgg {
        let nugget = (sy * sgg - sg * sgy) / det;
        let sill = (sw * sgy - sg * sy) / det;
        if nugget >= 0.0 && sill >= MIN_SILL {
            candidates.push((nugget, sill));
        }
    }
    if sgg > 0.0 {
        candidates.push((0.0, (sgy / sgg).max(MIN_SILL)));
    }
    candidates.push((((sy - MIN_SILL * sg) / sw).max(0.0), MIN_SILL));
    candidates.push((0.0, MIN_SILL));
    candidates
        .into_iter()
        .map(|(nugget, sill)| VariogramModel { nugget, sill, range })
        .min_by(|a, b| weighted_sse(empirical, a).total_cmp(&weighted_sse(empirical, b)))
        .expect("non-empty candidates")
}
