use crate::cube::FrequencySpaceCube;
use crate::error::{Error, Result};
use crate::grid::Map2;

/// Fills the unobserved target layer by a per-cell least-squares line of
/// value (dBm) against `10·log10(f)` through the other layers, evaluated at
/// the target frequency.
///
/// Exact when every layer differs from the others by the free-space
/// frequency term alone, as with broadband transmitters and no shadowing.
pub fn complete_target_layer(
    estimates: &FrequencySpaceCube,
    frequencies_mhz: &[f64],
    target_index: usize,
) -> Result<Map2> {
    if frequencies_mhz.len() != estimates.layer_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} frequencies for a cube of {} layers",
            frequencies_mhz.len(),
            estimates.layer_count()
        )));
    }
    if target_index >= frequencies_mhz.len() {
        return Err(Error::InvalidArgument(format!("target index {target_index} out of range")));
    }
    let sampled: Vec<usize> = (0..frequencies_mhz.len()).filter(|&k| k != target_index).collect();
    if sampled.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "completion needs at least 2 sampled layers, got {}",
            sampled.len()
        )));
    }
    let log_f = |k: usize| 10.0 * frequencies_mhz[k].log10();
    let x_mean = sampled.iter().map(|&k| log_f(k)).sum::<f64>() / sampled.len() as f64;
    let sxx: f64 = sampled.iter().map(|&k| (log_f(k) - x_mean).powi(2)).sum();
    let x_target = log_f(target_index);

    let n = estimates.side();
    let values = (0..n * n)
        .map(|idx| {
            let y_mean = sampled.iter().map(|&k| estimates.layer(k)[idx]).sum::<f64>()
                / sampled.len() as f64;
            let sxy: f64 = sampled
                .iter()
                .map(|&k| (log_f(k) - x_mean) * (estimates.layer(k)[idx] - y_mean))
                .sum();
            y_mean + sxy / sxx * (x_target - x_mean)
        })
        .collect();
    Map2::from_vec(n, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_layers_complete_flat() {
        let cube = FrequencySpaceCube::filled(4, 4, -77.0);
        let map = complete_target_layer(&cube, &[900.0, 1500.0, 1800.0, 2100.0], 2).unwrap();
        assert!(map.values().iter().all(|&v| (v - -77.0).abs() < 1e-12));
    }

    #[test]
    fn two_layers_interpolate_on_log_frequency() {
        let (v1, v2) = (-60.0, -75.0);
        let mut cube = FrequencySpaceCube::filled(2, 3, 0.0);
        cube.layer_mut(0).fill(v1);
        cube.layer_mut(2).fill(v2);
        let freqs = [900.0, 1800.0, 2100.0];
        let map = complete_target_layer(&cube, &freqs, 1).unwrap();
        let l = |f: f64| 10.0 * f.log10();
        let expected = v1 + (v2 - v1) * (l(1800.0) - l(900.0)) / (l(2100.0) - l(900.0));
        assert!(map.values().iter().all(|&v| (v - expected).abs() < 1e-12));
    }

    #[test]
    fn needs_two_sampled_layers() {
        let cube = FrequencySpaceCube::filled(2, 2, 0.0);
        assert!(complete_target_layer(&cube, &[900.0, 1800.0], 1).is_err());
        assert!(complete_target_layer(&cube, &[900.0], 0).is_err());
    }
}
