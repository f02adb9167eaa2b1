//! Little-endian container files shared with the trainer.
//!
//! Dataset (`SPCM`, version 1):
//!
//! ```text
//! magic "SPCM" | u8 version | u32 record_count | u32 N | u32 K+1
//! | (K+1) x f32 frequency_mhz | u8 target_index
//! per record: u64 scene_id | f32 density | u64 seed
//!             | f32 P[K+1][N][N] | f32 S[K+1][N][N] | u8 Z[N][N] | u8 M[N][N]
//! ```
//!
//! Predictions (`SPCP`, version 1):
//!
//! ```text
//! magic "SPCP" | u8 version | u32 record_count | u32 N | u32 K+1
//! per record: u64 scene_id | f32 E[K+1][N][N]
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::cube::FrequencySpaceCube;
use crate::error::{Error, Result};
use crate::grid::BinaryMap;
use crate::observation::SemanticMaps;
use crate::scene::validate_frequencies;

pub const DATASET_MAGIC: [u8; 4] = *b"SPCM";
pub const PREDICTION_MAGIC: [u8; 4] = *b"SPCP";
pub const FORMAT_VERSION: u8 = 1;

/// One experiment sample as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRecord {
    pub scene_id: u64,
    pub density: f32,
    pub seed: u64,
    pub frequencies_mhz: Vec<f64>,
    pub target_index: usize,
    /// Ground truth P.
    pub truth: FrequencySpaceCube,
    /// Incomplete observation S.
    pub incomplete: FrequencySpaceCube,
    pub semantics: SemanticMaps,
}

impl ScenarioRecord {
    pub fn side(&self) -> usize {
        self.truth.side()
    }

    pub fn layer_count(&self) -> usize {
        self.frequencies_mhz.len()
    }

    pub fn validate(&self) -> Result<()> {
        validate_frequencies(&self.frequencies_mhz)?;
        let n = self.truth.side();
        let layers = self.frequencies_mhz.len();
        if self.target_index >= layers {
            return Err(Error::ShapeMismatch(format!(
                "scene {}: target index {} with {layers} frequencies",
                self.scene_id, self.target_index
            )));
        }
        if self.truth.layer_count() != layers || !self.truth.same_shape(&self.incomplete) {
            return Err(Error::ShapeMismatch(format!(
                "scene {}: cube shapes disagree with {layers} frequencies",
                self.scene_id
            )));
        }
        if self.semantics.city.side() != n || self.semantics.sampling.side() != n {
            return Err(Error::ShapeMismatch(format!(
                "scene {}: semantic maps do not match the {n}x{n} grid",
                self.scene_id
            )));
        }
        Ok(())
    }
}

/// One estimated cube keyed by scene.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub scene_id: u64,
    pub estimate: FrequencySpaceCube,
}

pub fn dataset_file_len(n: usize, layers: usize, records: usize) -> u64 {
    let cells = (n * n) as u64;
    let layers = layers as u64;
    17 + 4 * layers + 1 + records as u64 * (8 + 4 + 8 + 2 * 4 * cells * layers + 2 * cells)
}

pub fn prediction_file_len(n: usize, layers: usize, records: usize) -> u64 {
    17 + records as u64 * (8 + 4 * (n * n * layers) as u64)
}

/// Writes `records` atomically. Every record is validated against the first
/// before the file is created.
pub fn write_dataset(records: &[ScenarioRecord], path: &Path) -> Result<usize> {
    let Some(first) = records.first() else {
        return Err(Error::InvalidArgument("refusing to write an empty dataset".into()));
    };
    for record in records {
        record.validate()?;
        if record.side() != first.side()
            || record.frequencies_mhz != first.frequencies_mhz
            || record.target_index != first.target_index
        {
            return Err(Error::ShapeMismatch(format!(
                "scene {} disagrees with scene {} on grid size, frequencies or target",
                record.scene_id, first.scene_id
            )));
        }
    }
    let target = u8::try_from(first.target_index)
        .map_err(|_| Error::ShapeMismatch("target index does not fit in a byte".into()))?;
    let count = u32::try_from(records.len())
        .map_err(|_| Error::InvalidArgument("too many records".into()))?;
    write_atomically(path, |w| {
        w.write_all(&DATASET_MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&count.to_le_bytes())?;
        w.write_all(&(first.side() as u32).to_le_bytes())?;
        w.write_all(&(first.layer_count() as u32).to_le_bytes())?;
        for &f in &first.frequencies_mhz {
            w.write_all(&(f as f32).to_le_bytes())?;
        }
        w.write_all(&[target])?;
        for r in records {
            w.write_all(&r.scene_id.to_le_bytes())?;
            w.write_all(&r.density.to_le_bytes())?;
            w.write_all(&r.seed.to_le_bytes())?;
            write_cube(w, &r.truth)?;
            write_cube(w, &r.incomplete)?;
            w.write_all(r.semantics.city.as_bytes())?;
            w.write_all(r.semantics.sampling.as_bytes())?;
        }
        Ok(())
    })?;
    Ok(records.len())
}

pub fn read_dataset(path: &Path) -> Result<Vec<ScenarioRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_dataset(&bytes)
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Vec<ScenarioRecord>> {
    let mut r = Reader::new(bytes);
    let (count, n, layers) = r.preamble(DATASET_MAGIC)?;
    let frequencies_mhz: Vec<f64> = (0..layers)
        .map(|_| r.f32("header").map(f64::from))
        .collect::<Result<_>>()?;
    let target_index = r.u8("header")? as usize;
    validate_frequencies(&frequencies_mhz).map_err(|e| Error::Header(e.to_string()))?;
    if target_index >= layers {
        return Err(Error::Header(format!("target index {target_index} with {layers} layers")));
    }
    let cells = n * n;
    let mut records = Vec::with_capacity(count.min(1 << 16));
    for idx in 0..count {
        let at = || format!("record {idx}");
        let scene_id = r.u64(&at())?;
        let density = r.f32(&at())?;
        let seed = r.u64(&at())?;
        let truth = r.cube(n, layers, idx, "P")?;
        let incomplete = r.cube(n, layers, idx, "S")?;
        let city = r.binary(cells, idx, "Z")?;
        let sampling = r.binary(cells, idx, "M")?;
        if !density.is_finite() {
            return Err(Error::NonFinite { record: idx, what: "density" });
        }
        records.push(ScenarioRecord {
            scene_id,
            density,
            seed,
            frequencies_mhz: frequencies_mhz.clone(),
            target_index,
            truth,
            incomplete,
            semantics: SemanticMaps {
                city: BinaryMap::from_vec(n, city)?,
                sampling: BinaryMap::from_vec(n, sampling)?,
            },
        });
    }
    r.finish()?;
    Ok(records)
}

/// Writes a prediction file of `n`×`n`×`layers` cubes. An empty slice yields
/// a header-only file.
pub fn write_predictions(
    records: &[PredictionRecord],
    n: usize,
    layers: usize,
    path: &Path,
) -> Result<usize> {
    if let Some(bad) = records.iter().find(|r| r.estimate.side() != n || r.estimate.layer_count() != layers) {
        return Err(Error::ShapeMismatch(format!(
            "prediction for scene {} is {1}x{1}x{2}, expected {n}x{n}x{layers}",
            bad.scene_id,
            bad.estimate.side(),
            bad.estimate.layer_count()
        )));
    }
    let count = u32::try_from(records.len())
        .map_err(|_| Error::InvalidArgument("too many records".into()))?;
    write_atomically(path, |w| {
        w.write_all(&PREDICTION_MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&count.to_le_bytes())?;
        w.write_all(&(n as u32).to_le_bytes())?;
        w.write_all(&(layers as u32).to_le_bytes())?;
        for r in records {
            w.write_all(&r.scene_id.to_le_bytes())?;
            write_cube(w, &r.estimate)?;
        }
        Ok(())
    })?;
    Ok(records.len())
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_predictions(&bytes)
}

pub fn decode_predictions(bytes: &[u8]) -> Result<Vec<PredictionRecord>> {
    let mut r = Reader::new(bytes);
    let (count, n, layers) = r.preamble(PREDICTION_MAGIC)?;
    let mut records = Vec::with_capacity(count.min(1 << 16));
    for idx in 0..count {
        let scene_id = r.u64(&format!("record {idx}"))?;
        let estimate = r.cube(n, layers, idx, "E")?;
        records.push(PredictionRecord { scene_id, estimate });
    }
    r.finish()?;
    Ok(records)
}

/// Which container a file holds, judged by its magic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Dataset,
    Predictions,
}

pub fn sniff(path: &Path) -> Result<FileKind> {
    use std::io::Read;
    let mut magic = [0u8; 4];
    File::open(path)
        .and_then(|mut f| f.read_exact(&mut magic))
        .map_err(|e| Error::io(path, e))?;
    match magic {
        DATASET_MAGIC => Ok(FileKind::Dataset),
        PREDICTION_MAGIC => Ok(FileKind::Predictions),
        found => Err(Error::BadMagic { expected: DATASET_MAGIC, found }),
    }
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomically(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<&mut File>) -> std::io::Result<()>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_bytes_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomically(path, |w| w.write_all(bytes))
}

fn write_cube(w: &mut impl Write, cube: &FrequencySpaceCube) -> std::io::Result<()> {
    for &v in cube.values() {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize, context: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(Error::Truncated(context.to_string())),
        }
    }

    fn array<const L: usize>(&mut self, context: &str) -> Result<[u8; L]> {
        Ok(self.take(L, context)?.try_into().expect("slice of length L"))
    }

    fn u8(&mut self, context: &str) -> Result<u8> {
        Ok(self.take(1, context)?[0])
    }

    fn u32(&mut self, context: &str) -> Result<u32> {
        self.array(context).map(u32::from_le_bytes)
    }

    fn u64(&mut self, context: &str) -> Result<u64> {
        self.array(context).map(u64::from_le_bytes)
    }

    fn f32(&mut self, context: &str) -> Result<f32> {
        self.array(context).map(f32::from_le_bytes)
    }

    fn preamble(&mut self, magic: [u8; 4]) -> Result<(usize, usize, usize)> {
        let found: [u8; 4] = self.array("header")?;
        if found != magic {
            return Err(Error::BadMagic { expected: magic, found });
        }
        let version = self.u8("header")?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let count = self.u32("header")? as usize;
        let n = self.u32("header")? as usize;
        let layers = self.u32("header")? as usize;
        if n == 0 || layers == 0 {
            return Err(Error::Header(format!("grid {n}x{n} with {layers} layers")));
        }
        Ok((count, n, layers))
    }

    fn cube(&mut self, n: usize, layers: usize, record: usize, what: &'static str) -> Result<FrequencySpaceCube> {
        let len = n * n * layers;
        let raw = self.take(len * 4, &format!("record {record}"))?;
        let values: Vec<f64> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { record, what });
        }
        FrequencySpaceCube::from_vec(n, layers, values)
    }

    fn binary(&mut self, cells: usize, record: usize, what: &'static str) -> Result<Vec<u8>> {
        let raw = self.take(cells, &format!("record {record}"))?;
        if let Some(&value) = raw.iter().find(|&&b| b > 1) {
            return Err(Error::NonBinary { record, what, value });
        }
        Ok(raw.to_vec())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Header(format!(
                "{} trailing bytes after the last record",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}
