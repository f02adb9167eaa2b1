//! Plain-text `key = value` experiment configuration. Blank lines and `#`
//! comments are ignored; unknown keys are errors.

use std::path::Path;

use crate::error::{Error, Result};
use crate::propagation::PropagationParams;
use crate::scene::{FrequencyMode, SceneConfig};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub scene: SceneConfig,
    pub propagation: PropagationParams,
    /// Standard deviation of Gaussian dB noise on observations; 0 is off.
    pub measurement_noise_db: f64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got {line:?}", lineno + 1))
            })?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        self.propagation.validate()?;
        if !(self.measurement_noise_db >= 0.0 && self.measurement_noise_db.is_finite()) {
            return Err(Error::Config("measurement_noise_db must be non-negative".into()));
        }
        if self.propagation.noise_floor >= self.scene.power_min_dbm {
            return Err(Error::Config(format!(
                "noise floor {} dBm must sit below the minimum transmit power {} dBm",
                self.propagation.noise_floor, self.scene.power_min_dbm
            )));
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.scene;
        let p = &mut self.propagation;
        match key {
            "side_meters" => s.side_meters = real(key, value)?,
            "cells_per_side" => s.cells_per_side = integer(key, value)?,
            "frequencies" => {
                s.frequencies_mhz = value
                    .split(',')
                    .map(|f| real(key, f.trim()))
                    .collect::<Result<_>>()?
            }
            "target_mhz" | "target" => s.target_mhz = real(key, value)?,
            "buildings_min" => s.buildings_min = integer(key, value)?,
            "buildings_max" => s.buildings_max = integer(key, value)?,
            "building_side_min_cells" => s.building_side_min_cells = real(key, value)?,
            "building_side_max_cells" => s.building_side_max_cells = real(key, value)?,
            "transmitters_min" => s.transmitters_min = integer(key, value)?,
            "transmitters_max" => s.transmitters_max = integer(key, value)?,
            "power_min_dbm" => s.power_min_dbm = real(key, value)?,
            "power_max_dbm" => s.power_max_dbm = real(key, value)?,
            "frequency_mode" => {
                s.frequency_mode = match value {
                    "single" => FrequencyMode::Single,
                    "broadband" => FrequencyMode::Broadband,
                    other => {
                        return Err(Error::Config(format!(
                            "frequency_mode must be single or broadband, got {other:?}"
                        )))
                    }
                }
            }
            "path_loss_exponent" => p.path_loss_exponent = real(key, value)?,
            "wall_loss_per_cell" => p.wall_loss_per_cell = real(key, value)?,
            "wall_loss_cap" => p.wall_loss_cap = real(key, value)?,
            "reference_distance" => p.reference_distance = real(key, value)?,
            "noise_floor" => p.noise_floor = real(key, value)?,
            "shadowing_sigma" => p.shadowing_sigma = real(key, value)?,
            "shadowing_correlation_cells" => p.shadowing_correlation_cells = real(key, value)?,
            "measurement_noise_db" => self.measurement_noise_db = real(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Every key with its resolved value, in a fixed order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let s = &self.scene;
        let p = &self.propagation;
        let freqs: Vec<String> = s.frequencies_mhz.iter().map(|f| f.to_string()).collect();
        vec![
            ("side_meters", s.side_meters.to_string()),
            ("cells_per_side", s.cells_per_side.to_string()),
            ("frequencies", freqs.join(",")),
            ("target_mhz", s.target_mhz.to_string()),
            ("buildings_min", s.buildings_min.to_string()),
            ("buildings_max", s.buildings_max.to_string()),
            ("building_side_min_cells", s.building_side_min_cells.to_string()),
            ("building_side_max_cells", s.building_side_max_cells.to_string()),
            ("transmitters_min", s.transmitters_min.to_string()),
            ("transmitters_max", s.transmitters_max.to_string()),
            ("power_min_dbm", s.power_min_dbm.to_string()),
            ("power_max_dbm", s.power_max_dbm.to_string()),
            ("frequency_mode", s.frequency_mode.as_str().to_string()),
            ("path_loss_exponent", p.path_loss_exponent.to_string()),
            ("wall_loss_per_cell", p.wall_loss_per_cell.to_string()),
            ("wall_loss_cap", p.wall_loss_cap.to_string()),
            ("reference_distance", p.reference_distance.to_string()),
            ("noise_floor", p.noise_floor.to_string()),
            ("shadowing_sigma", p.shadowing_sigma.to_string()),
            ("shadowing_correlation_cells", p.shadowing_correlation_cells.to_string()),
            ("measurement_noise_db", self.measurement_noise_db.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn real(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("{key}: expected a number, got {value:?}")))
}

fn integer(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {value:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reference_experiment() {
        let c = ExperimentConfig::parse("").unwrap();
        assert_eq!(c.scene.side_meters, 256.0);
        assert_eq!(c.scene.cells_per_side, 64);
        assert_eq!(c.scene.frequencies_mhz, vec![900.0, 1500.0, 1800.0, 2100.0]);
        assert_eq!(c.scene.target_mhz, 1800.0);
        assert_eq!(c.propagation, PropagationParams::default());
    }

    #[test]
    fn parses_overrides_and_comments() {
        let text = "# desk run\ncells_per_side = 32\nside_meters=128\n\nfrequency_mode = broadband # all layers\nshadowing_sigma = 4\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.scene.cells_per_side, 32);
        assert_eq!(c.scene.frequency_mode, FrequencyMode::Broadband);
        assert_eq!(c.propagation.shadowing_sigma, 4.0);
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(ExperimentConfig::parse("colour = red").is_err());
        assert!(ExperimentConfig::parse("cells_per_side").is_err());
        assert!(ExperimentConfig::parse("cells_per_side = -3").is_err());
        assert!(ExperimentConfig::parse("target_mhz = 1000").is_err());
        assert!(ExperimentConfig::parse("noise_floor = 20").is_err());
    }

    #[test]
    fn text_round_trips() {
        let mut c = ExperimentConfig::default();
        c.scene.frequencies_mhz = vec![700.0, 2600.0, 3500.0];
        c.scene.target_mhz = 2600.0;
        c.measurement_noise_db = 1.5;
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }
}
