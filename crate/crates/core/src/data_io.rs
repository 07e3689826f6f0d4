//! JSON Lines rectangle datasets and seeded synthetic workloads.
//!
//! One record per line: `{"id":1,"min":[0,2],"max":[0,2]}`. The writer is
//! canonical: keys in that order, integral values without a fraction, all
//! other values in shortest round-trip form, LF after every record.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Interval, Rect};
use crate::index::Entry;
use crate::rng::SeededRng;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: record {id}: {message}")]
    Validation { line: usize, id: u64, message: String },

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// On-disk form of one dataset entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub id: u64,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl DatasetRecord {
    fn into_entry(self, line: usize) -> Result<Entry, DataError> {
        let invalid = |message: String| DataError::Validation {
            line,
            id: self.id,
            message,
        };
        if self.min.is_empty() {
            return Err(invalid("min and max must have at least one coordinate".into()));
        }
        if self.min.len() != self.max.len() {
            return Err(invalid(format!(
                "min has {} coordinates but max has {}",
                self.min.len(),
                self.max.len()
            )));
        }
        let mut dims = Vec::with_capacity(self.min.len());
        for (i, (&lo, &hi)) in self.min.iter().zip(&self.max).enumerate() {
            let iv = Interval::new(lo, hi).map_err(|e| invalid(format!("dimension {i}: {e}")))?;
            dims.push(iv);
        }
        let mbr = Rect::new(dims).map_err(|e| invalid(e.to_string()))?;
        Ok(Entry::new(self.id, mbr))
    }
}

impl From<&Entry> for DatasetRecord {
    fn from(e: &Entry) -> Self {
        DatasetRecord {
            id: e.id,
            min: e.mbr.min_corner(),
            max: e.mbr.max_corner(),
        }
    }
}

/// Reads newline-delimited records. Blank lines are skipped.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<Entry>, DataError> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord = serde_json::from_str(&line).map_err(|e| DataError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let id = record.id;
        let entry = record.into_entry(line_no)?;
        if let Some(first) = entries.first() {
            if first.mbr.dims() != entry.mbr.dims() {
                return Err(DataError::Validation {
                    line: line_no,
                    id,
                    message: format!(
                        "has {} dimensions but the dataset has {}",
                        entry.mbr.dims(),
                        first.mbr.dims()
                    ),
                });
            }
        }
        if !ids.insert(id) {
            return Err(DataError::Validation {
                line: line_no,
                id,
                message: "duplicate id".into(),
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Canonical number text: integers without a fraction, everything else in
/// shortest round-trip form.
pub fn format_number(v: f64) -> String {
    const EXACT_INT: f64 = 9_007_199_254_740_992.0; // 2^53
    if v.fract() == 0.0 && v.abs() < EXACT_INT {
        format!("{}", v as i64)
    } else {
        serde_json::to_string(&v).expect("finite coordinate")
    }
}

fn push_coords(line: &mut String, coords: &[f64]) {
    line.push('[');
    for (i, &v) in coords.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&format_number(v));
    }
    line.push(']');
}

/// Canonical single-line form of one entry, without the trailing newline.
pub fn format_record(entry: &Entry) -> String {
    let mut line = String::with_capacity(32);
    let _ = write!(line, "{{\"id\":{},\"min\":", entry.id);
    push_coords(&mut line, &entry.mbr.min_corner());
    line.push_str(",\"max\":");
    push_coords(&mut line, &entry.mbr.max_corner());
    line.push('}');
    line
}

pub fn write_jsonl<W: Write>(mut writer: W, entries: &[Entry]) -> io::Result<()> {
    for e in entries {
        writer.write_all(format_record(e).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    Clustered,
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "clustered" => Ok(Distribution::Clustered),
            other => Err(format!(
                "unknown distribution `{other}` (expected uniform or clustered)"
            )),
        }
    }
}

/// Parameters of a synthetic rectangle workload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub d: usize,
    pub extent_lo: f64,
    pub extent_hi: f64,
    /// Largest side length of a generated rectangle.
    pub max_side: f64,
    pub distribution: Distribution,
    /// Number of clusters; only read for `Distribution::Clustered`.
    pub clusters: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n: 1000,
            d: 2,
            extent_lo: 0.0,
            extent_hi: 1.0,
            max_side: 0.05,
            distribution: Distribution::Uniform,
            clusters: 8,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::InvalidConfig(m.to_string()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.d == 0 {
            return bad("d must be at least 1");
        }
        if !self.extent_lo.is_finite() || !self.extent_hi.is_finite() || self.extent_lo >= self.extent_hi {
            return bad("extent must be finite with extent_lo < extent_hi");
        }
        if !(self.max_side >= 0.0 && self.max_side <= self.extent_hi - self.extent_lo) {
            return bad("max_side must lie in [0, extent_hi - extent_lo]");
        }
        if self.distribution == Distribution::Clustered && self.clusters == 0 {
            return bad("clustered generation needs at least one cluster");
        }
        Ok(())
    }
}

/// Generates `config.n` rectangles with ids `0..n`.
///
/// Draw order per entry: the cluster index (clustered only), then for each
/// dimension the center followed by the side length. Clustered generation
/// first draws all cluster centers, dimension by dimension. Members scatter
/// around their cluster with a standard deviation of 5% of the extent.
pub fn generate(config: &GeneratorConfig) -> Result<Vec<Entry>, DataError> {
    config.validate()?;
    let (lo, hi) = (config.extent_lo, config.extent_hi);
    let sigma = 0.05 * (hi - lo);
    let mut rng = SeededRng::new(config.seed);

    let cluster_centers: Vec<Vec<f64>> = match config.distribution {
        Distribution::Uniform => Vec::new(),
        Distribution::Clustered => (0..config.clusters)
            .map(|_| (0..config.d).map(|_| rng.uniform(lo, hi)).collect())
            .collect(),
    };

    let mut entries = Vec::with_capacity(config.n);
    for id in 0..config.n {
        let cluster = match config.distribution {
            Distribution::Uniform => None,
            Distribution::Clustered => Some(&cluster_centers[rng.below(config.clusters as u64) as usize]),
        };
        let mut dims = Vec::with_capacity(config.d);
        for j in 0..config.d {
            let center = match cluster {
                None => rng.uniform(lo, hi),
                Some(c) => (c[j] + sigma * rng.normal()).clamp(lo, hi),
            };
            let half = 0.5 * rng.uniform(0.0, config.max_side);
            let iv =
                Interval::new((center - half).max(lo), (center + half).min(hi)).expect("clipped interval is ordered");
            dims.push(iv);
        }
        entries.push(Entry::new(id as u64, Rect::new(dims).expect("d >= 1")));
    }
    Ok(entries)
}
