//! Dense point sets and their two on-disk formats.
//!
//! CSV: one point per line, comma-separated decimal floats, no header.
//! packed_f32: `"BJLD"`, `u32` version, `u32` dimension, `u64` count, then
//! `count * n` little-endian `f32` values, row-major.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATASET_MAGIC: &[u8; 4] = b"BJLD";
pub const DATASET_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    #[default]
    Csv,
    PackedF32,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(DatasetFormat::Csv),
            "packed_f32" => Ok(DatasetFormat::PackedF32),
            other => Err(Error::invalid(format!("unknown dataset format {other:?}"))),
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetFormat::Csv => "csv",
            DatasetFormat::PackedF32 => "packed_f32",
        })
    }
}

/// A finite set of points in `R^n`, stored row-major with cached norms.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetMatrix {
    n: usize,
    points: Vec<f64>,
    norms: Vec<f64>,
    radius: f64,
}

impl DatasetMatrix {
    pub fn from_flat(n: usize, points: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if points.is_empty() {
            return Err(Error::format("empty dataset"));
        }
        if !points.len().is_multiple_of(n) {
            return Err(Error::invalid(format!(
                "{} values do not form rows of length {n}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value in point {} at coordinate {}",
                i / n,
                i % n
            )));
        }
        let norms: Vec<f64> = points
            .chunks_exact(n)
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        let radius = norms.iter().copied().fold(0.0, f64::max);
        Ok(DatasetMatrix { n, points, norms, radius })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map(Vec::len).ok_or_else(|| Error::format("empty dataset"))?;
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "row {i} has {} values, expected {n}",
                rows[i].len()
            )));
        }
        Self::from_flat(n, rows.into_iter().flatten().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.norms.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.n)
    }

    pub fn flat(&self) -> &[f64] {
        &self.points
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Largest point norm.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dot(&self, i: usize, j: usize) -> f64 {
        self.point(i).iter().zip(self.point(j)).map(|(a, b)| a * b).sum()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.points() {
            let line: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Encodes as packed_f32. Coordinates are rounded to `f32`.
    pub fn to_packed_f32(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.points.len());
        out.extend_from_slice(DATASET_MAGIC);
        out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.count() as u64).to_le_bytes());
        for &v in &self.points {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
        out
    }

    pub fn encode(&self, format: DatasetFormat) -> Vec<u8> {
        match format {
            DatasetFormat::Csv => self.to_csv().into_bytes(),
            DatasetFormat::PackedF32 => self.to_packed_f32(),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses CSV text. Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_csv(text: &str) -> Result<DatasetMatrix> {
    let mut n = None;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let start = values.len();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line_no, format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value {field:?}")));
            }
            values.push(v);
        }
        let width = values.len() - start;
        match n {
            None => n = Some(width),
            Some(expected) if expected != width => {
                return Err(parse_err(
                    line_no,
                    format!("ragged row: {width} values, expected {expected}"),
                ))
            }
            Some(_) => {}
        }
    }
    match n {
        None => Err(Error::format("empty dataset")),
        Some(n) => DatasetMatrix::from_flat(n, values),
    }
}

/// Decodes a packed_f32 buffer.
pub fn decode_packed_f32(bytes: &[u8]) -> Result<DatasetMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format("truncated dataset header"));
    }
    if &bytes[..4] != DATASET_MAGIC {
        return Err(Error::format("bad dataset magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != DATASET_VERSION {
        return Err(Error::format(format!("unsupported dataset version {version}")));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let count = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    if count == 0 {
        return Err(Error::format("empty dataset"));
    }
    if n == 0 {
        return Err(Error::format("dimension is zero"));
    }
    let body = &bytes[HEADER_LEN..];
    let expected = usize::try_from(count)
        .ok()
        .and_then(|c| c.checked_mul(n))
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::format("dataset size overflows"))?;
    if body.len() != expected {
        return Err(Error::format(format!(
            "dataset body has {} bytes, header implies {expected}",
            body.len()
        )));
    }
    let mut values = Vec::with_capacity(expected / 4);
    for (i, chunk) in body.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !v.is_finite() {
            return Err(Error::format(format!(
                "non-finite value in record {} at coordinate {}",
                i / n + 1,
                i % n
            )));
        }
        values.push(f64::from(v));
    }
    DatasetMatrix::from_flat(n, values)
}

pub fn decode_dataset(bytes: &[u8], format: DatasetFormat) -> Result<DatasetMatrix> {
    match format {
        DatasetFormat::Csv => {
            let text = std::str::from_utf8(bytes)
                .map_err(|e| Error::format(format!("dataset is not UTF-8: {e}")))?;
            parse_csv(text)
        }
        DatasetFormat::PackedF32 => decode_packed_f32(bytes),
    }
}

pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<DatasetMatrix> {
    decode_dataset(&fs::read(path)?, format)
}

pub fn save_dataset(data: &DatasetMatrix, path: impl AsRef<Path>, format: DatasetFormat) -> Result<()> {
    fs::write(path, data.encode(format))?;
    Ok(())
}
