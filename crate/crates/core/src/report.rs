//! Report serialization: deterministic CSV/JSON artifacts.
//!
//! Every run writes into one output directory: one CSV or JSON per
//! analysis, then `index.json` — written last — listing each file with its
//! SHA-256, so a truncated or interrupted run is detectable by a missing
//! or inconsistent index. All files are placed atomically (temp + rename),
//! floats print through Rust's shortest-roundtrip formatter with `.`
//! decimals, and every JSON document embeds the config hash and tool
//! version that produced it; reruns of the same config are byte-identical.

use crate::error::Result;
use crate::hecke::PathCountReport;
use crate::spectral::{DensityProfile, Spectrum, CLASSIFY_TOL};
use crate::walks::{AlmostDiameterStats, WalkProfile};
use crate::zeta::ZetaRow;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Version string stamped into every JSON report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to `path` atomically: a temp file in the same directory
/// is renamed over the target, so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct IndexEntry {
    name: String,
    sha256: String,
    bytes: usize,
}

/// Accumulates report files in one directory and finishes by writing the
/// checksum index.
pub struct ReportWriter {
    dir: PathBuf,
    config_hash: String,
    entries: Vec<IndexEntry>,
}

impl ReportWriter {
    pub fn new(dir: impl Into<PathBuf>, config_hash: impl Into<String>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(ReportWriter { dir, config_hash: config_hash.into(), entries: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    fn place(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        atomic_write(&self.dir.join(name), bytes)?;
        self.entries.push(IndexEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Writes a prebuilt CSV document (`name` should end in `.csv`).
    pub fn write_csv(&mut self, name: &str, csv: &str) -> Result<()> {
        self.place(name, csv.as_bytes())
    }

    /// Writes `data` wrapped in the provenance envelope
    /// `{config_hash, tool_version, data}` (`name` should end in `.json`).
    pub fn write_json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<()> {
        let doc = serde_json::json!({
            "config_hash": self.config_hash,
            "tool_version": TOOL_VERSION,
            "data": data,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.place(name, text.as_bytes())
    }

    /// Writes `index.json` (the completion marker) and returns the
    /// directory. Must be called last; the index lists every other file.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.entries.sort_by(|a, b| a.name.cmp(&b.name));
        let doc = serde_json::json!({
            "config_hash": self.config_hash,
            "tool_version": TOOL_VERSION,
            "files": self.entries,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        atomic_write(&self.dir.join("index.json"), text.as_bytes())?;
        Ok(self.dir)
    }
}

/// `index,lambda,theta_abs,inv_p` — one row per eigenvalue.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("index,lambda,theta_abs,inv_p\n");
    for (i, pv) in s.annotated(CLASSIFY_TOL).iter().enumerate() {
        writeln!(out, "{},{},{},{}", i, pv.lambda, pv.theta_abs, pv.inv_p).expect("string write");
    }
    out
}

/// `p,count` — cumulative eigenvalue counts along the p-grid.
pub fn density_csv(profile: &DensityProfile) -> String {
    let mut out = String::from("p,count\n");
    for &(p, count) in &profile.rows {
        writeln!(out, "{p},{count}").expect("string write");
    }
    out
}

/// `k,vertex,count` — per-vertex closed path counts; budget-truncated
/// reports contribute no rows (their totals still appear in the JSON).
pub fn paths_csv(reports: &[PathCountReport]) -> String {
    let mut out = String::from("k,vertex,count\n");
    for rep in reports {
        for (v, c) in rep.per_vertex.iter().enumerate() {
            writeln!(out, "{},{},{}", rep.k, v, c).expect("string write");
        }
    }
    out
}

/// `k,N,pi,residue` — closed cycle counts, primitive counts, and the
/// integrality residue of the trace.
pub fn zeta_csv(rows: &[ZetaRow]) -> String {
    let mut out = String::from("k,N,pi,residue\n");
    for row in rows {
        writeln!(out, "{},{},{},{}", row.k, row.n_k, row.pi_k, row.residue)
            .expect("string write");
    }
    out
}

/// `source,k,l1,tv` — one walk profile.
pub fn walk_csv(profile: &WalkProfile) -> String {
    let mut out = String::from("source,k,l1,tv\n");
    for (&k, &l1) in profile.ks.iter().zip(&profile.l1) {
        writeln!(out, "{},{},{},{}", profile.source, k, l1, l1 / 2.0).expect("string write");
    }
    out
}

/// `source,far_count,n,threshold` — almost-diameter defects per source.
pub fn geometry_csv(stats: &AlmostDiameterStats) -> String {
    let mut out = String::from("source,far_count,n,threshold\n");
    for rep in &stats.reports {
        writeln!(out, "{},{},{},{}", rep.source, rep.far_count, stats.n, rep.radius_threshold)
            .expect("string write");
    }
    out
}
