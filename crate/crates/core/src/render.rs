//! 8-bit grayscale PGM rendering of a single map.

use crate::error::{Error, Result};
use crate::grid::Map2;

pub const DEFAULT_LO_DBM: f64 = -150.0;
pub const DEFAULT_HI_DBM: f64 = -20.0;

/// Maps `[lo, hi]` linearly onto `[0, 255]`, clamping outside and rounding
/// half up. NaN renders black.
pub fn pixel(value: f64, lo: f64, hi: f64) -> u8 {
    let t = (value - lo) / (hi - lo) * 255.0;
    if t.is_nan() {
        return 0;
    }
    (t + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Binary PGM (P5): row `i` top to bottom, column `j` left to right.
pub fn render_layer(map: &Map2, lo: f64, hi: f64) -> Result<Vec<u8>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "render bounds need lo < hi, got [{lo}, {hi}]"
        )));
    }
    let n = map.side();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(map.values().iter().map(|&v| pixel(v, lo, hi)));
    Ok(out)
}
