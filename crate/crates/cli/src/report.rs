//! Run reports: a human-readable text rendering (dB to 0.01) and
//! machine-readable CSV tables at full precision.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};
use tubeloss_core::bands::{BandMode, BandTable, RepetitionMode};
use tubeloss_core::formats::{band_tables_to_csv, narrowband_to_csv};
use tubeloss_core::models::MassLawConstant;
use tubeloss_core::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub tool_version: String,
    /// `sha256:<hex>` of the canonical configuration text, or `none`.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub band_mode: BandMode,
    pub rep_mode: RepetitionMode,
    pub masslaw_constant: MassLawConstant,
    pub inputs: Vec<String>,
    /// Seconds since the Unix epoch; the only field allowed to differ between
    /// regenerations of the same run.
    pub timestamp: u64,
}

pub fn hash_text(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(71);
    hex.push_str("sha256:");
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Narrowband columns on one frequency axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Narrowband {
    pub frequencies: Vec<f64>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
}

impl Narrowband {
    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let cols: Vec<(&str, &[Option<f64>])> = self.columns.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
        narrowband_to_csv(&self.frequencies, &cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub provenance: Provenance,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
    pub narrowband: Option<Narrowband>,
    pub bands: Vec<BandTable>,
}

fn cell(column: &str, v: Option<f64>) -> String {
    match (column, v) {
        (_, None) => "-".to_string(),
        (c, Some(x)) if c.ends_with("_sq") => format!("{x:.4}"),
        (c, Some(x)) if c.starts_with("valid") => format!("{x}"),
        (_, v) => db(v),
    }
}

fn db(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.to_string(),
        Some(x) => format!("{x:.2}"),
        None => "-".to_string(),
    }
}

impl RunReport {
    pub fn band_table(&self, name: &str) -> Option<&BandTable> {
        self.bands.iter().find(|t| t.name == name)
    }

    pub fn bands_csv(&self) -> Result<Option<String>> {
        if self.bands.is_empty() {
            return Ok(None);
        }
        band_tables_to_csv(&self.bands).map(Some)
    }

    pub fn narrowband_csv(&self) -> Option<String> {
        self.narrowband.as_ref().map(Narrowband::to_csv)
    }

    pub fn render_text(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        let _ = writeln!(out, "tubeloss {} report", self.command);
        out.push_str("\n[provenance]\n");
        let _ = writeln!(out, "tool_version = {}", p.tool_version);
        let _ = writeln!(out, "config_hash = {}", p.config_hash);
        let _ = writeln!(out, "seed = {}", p.seed.map_or("none".to_string(), |s| s.to_string()));
        let _ = writeln!(out, "band_mode = {}", p.band_mode);
        let _ = writeln!(out, "rep_mode = {}", p.rep_mode);
        let _ = writeln!(out, "masslaw_constant = {}", p.masslaw_constant.label());
        let _ = writeln!(out, "inputs = {}", p.inputs.join(", "));
        let _ = writeln!(out, "timestamp = {}", p.timestamp);

        out.push_str("\n[warnings]\n");
        if self.warnings.is_empty() {
            out.push_str("none\n");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "- {w}");
        }

        if !self.summary.is_empty() {
            out.push_str("\n[summary]\n");
            for s in &self.summary {
                let _ = writeln!(out, "{s}");
            }
        }

        if let Some(first) = self.bands.first() {
            out.push_str("\n[bands] (dB; coverage = fraction of valid bins)\n");
            let _ = write!(out, "{:>8}", "band_hz");
            for t in &self.bands {
                let _ = write!(out, " {:>14} {:>8}", t.name, "coverage");
            }
            out.push('\n');
            for (i, b) in first.bands.iter().enumerate() {
                let _ = write!(out, "{:>8}", b.nominal_hz);
                for t in &self.bands {
                    let _ = write!(out, " {:>14} {:>8.2}", db(t.values[i]), t.coverage[i]);
                }
                out.push('\n');
            }
        }

        if let Some(nb) = &self.narrowband {
            out.push_str("\n[narrowband] (dB unless noted)\n");
            let _ = write!(out, "{:>12}", "frequency_hz");
            for (name, _) in &nb.columns {
                let _ = write!(out, " {name:>14}");
            }
            out.push('\n');
            for (i, f) in nb.frequencies.iter().enumerate() {
                let _ = write!(out, "{f:>12}");
                for (name, col) in &nb.columns {
                    let _ = write!(out, " {:>14}", cell(name, col[i]));
                }
                out.push('\n');
            }
        }
        out
    }
}
