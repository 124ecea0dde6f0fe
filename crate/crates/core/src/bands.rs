//! One-third-octave bands, narrowband-to-band aggregation, repetition
//! statistics and insertion loss.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Nominal mid-band labels, indexed by n in 1000·2^{n/3}, n = -20..=13.
const NOMINAL_CENTERS: [f64; 34] = [
    10.0, 12.5, 16.0, 20.0, 25.0, 31.5, 40.0, 50.0, 63.0, 80.0, 100.0, 125.0, 160.0, 200.0, 250.0, 315.0, 400.0, 500.0,
    630.0, 800.0, 1000.0, 1250.0, 1600.0, 2000.0, 2500.0, 3150.0, 4000.0, 5000.0, 6300.0, 8000.0, 10000.0, 12500.0,
    16000.0, 20000.0,
];
const FIRST_BAND_INDEX: i32 = -20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdOctaveBand {
    /// Band number n, exact center 1000·2^{n/3}.
    pub index: i32,
    pub nominal_hz: f64,
    pub center_hz: f64,
    pub lower_hz: f64,
    pub upper_hz: f64,
}

impl ThirdOctaveBand {
    pub fn from_index(index: i32) -> Option<Self> {
        let slot = usize::try_from(index - FIRST_BAND_INDEX).ok()?;
        let nominal_hz = *NOMINAL_CENTERS.get(slot)?;
        let center_hz = 1000.0 * 2f64.powf(index as f64 / 3.0);
        let edge = 2f64.powf(1.0 / 6.0);
        Some(Self {
            index,
            nominal_hz,
            center_hz,
            lower_hz: center_hz / edge,
            upper_hz: center_hz * edge,
        })
    }

    /// Look up a band by its nominal label.
    pub fn from_nominal(nominal_hz: f64) -> Option<Self> {
        let slot = NOMINAL_CENTERS.iter().position(|&n| (n - nominal_hz).abs() < 1e-9)?;
        Self::from_index(slot as i32 + FIRST_BAND_INDEX)
    }

    /// Half-open membership `[lower, upper)`, so adjacent bands never share a bin.
    pub fn contains(&self, f: f64) -> bool {
        f >= self.lower_hz && f < self.upper_hz
    }
}

/// Bands whose nominal centers lie in `[f_min, f_max]`.
pub fn third_octave_bands(f_min: f64, f_max: f64) -> Result<Vec<ThirdOctaveBand>> {
    if !(f_min > 0.0 && f_max >= f_min) {
        return Err(Error::domain(format!("bad band range {f_min}..{f_max} Hz")));
    }
    let bands: Vec<_> = NOMINAL_CENTERS
        .iter()
        .enumerate()
        .filter(|(_, &n)| n >= f_min && n <= f_max)
        .filter_map(|(slot, _)| ThirdOctaveBand::from_index(slot as i32 + FIRST_BAND_INDEX))
        .collect();
    if bands.is_empty() {
        return Err(Error::domain(format!("no standard band center in {f_min}..{f_max} Hz")));
    }
    Ok(bands)
}

/// Whether a dB quantity is an attenuation (STL, IL) or a level (SPL).
/// Power averaging runs on 10^{-L/10} for the former and 10^{L/10} for the latter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Loss,
    Level,
}

/// How values are combined inside a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandMode {
    #[default]
    Power,
    Db,
}

/// How repeated runs are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepetitionMode {
    #[default]
    Db,
    Power,
}

impl FromStr for BandMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(BandMode::Power),
            "db" => Ok(BandMode::Db),
            other => Err(Error::domain(format!("unknown band mode '{other}' (power|db)"))),
        }
    }
}

impl FromStr for RepetitionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "db" => Ok(RepetitionMode::Db),
            "power" => Ok(RepetitionMode::Power),
            other => Err(Error::domain(format!("unknown repetition mode '{other}' (db|power)"))),
        }
    }
}

impl fmt::Display for BandMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BandMode::Power => "power",
            BandMode::Db => "db",
        })
    }
}

impl fmt::Display for RepetitionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RepetitionMode::Db => "db",
            RepetitionMode::Power => "power",
        })
    }
}

fn mean_db<'a>(values: impl Iterator<Item = &'a f64> + Clone, power: bool, quantity: Quantity) -> Option<f64> {
    let n = values.clone().count();
    if n == 0 {
        return None;
    }
    if !power {
        return Some(values.sum::<f64>() / n as f64);
    }
    let sign = match quantity {
        Quantity::Loss => -1.0,
        Quantity::Level => 1.0,
    };
    let mean_linear = values.map(|v| 10f64.powf(sign * v / 10.0)).sum::<f64>() / n as f64;
    Some(sign * 10.0 * mean_linear.log10())
}

/// One value per band, with `None` marking absent bands.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    pub name: String,
    pub bands: Vec<ThirdOctaveBand>,
    pub values: Vec<Option<f64>>,
    /// Share of narrowband bins in each band that were valid.
    pub coverage: Vec<f64>,
}

impl BandTable {
    /// Fully covered table from explicit values.
    pub fn new(name: impl Into<String>, bands: Vec<ThirdOctaveBand>, values: Vec<Option<f64>>) -> Result<Self> {
        if bands.len() != values.len() {
            return Err(Error::domain(format!(
                "{} bands but {} values",
                bands.len(),
                values.len()
            )));
        }
        if bands.windows(2).any(|w| w[1].index <= w[0].index) {
            return Err(Error::domain("bands must be in increasing order"));
        }
        let coverage = values.iter().map(|v| if v.is_some() { 1.0 } else { 0.0 }).collect();
        Ok(Self {
            name: name.into(),
            bands,
            values,
            coverage,
        })
    }

    pub fn nominal_centers(&self) -> Vec<f64> {
        self.bands.iter().map(|b| b.nominal_hz).collect()
    }

    pub fn value_at(&self, nominal_hz: f64) -> Option<f64> {
        self.bands
            .iter()
            .position(|b| (b.nominal_hz - nominal_hz).abs() < 1e-9)
            .and_then(|i| self.values[i])
    }

    pub fn negative_bands(&self) -> Vec<f64> {
        self.bands
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| matches!(v, Some(x) if *x < 0.0))
            .map(|(b, _)| b.nominal_hz)
            .collect()
    }

    pub fn ensure_same_bands(&self, other: &BandTable) -> Result<()> {
        let mine = self.nominal_centers();
        let theirs = other.nominal_centers();
        if mine == theirs {
            return Ok(());
        }
        let only_left: Vec<String> = mine
            .iter()
            .filter(|f| !theirs.contains(f))
            .map(|f| f.to_string())
            .collect();
        let only_right: Vec<String> = theirs
            .iter()
            .filter(|f| !mine.contains(f))
            .map(|f| f.to_string())
            .collect();
        Err(Error::BandMismatch(format!(
            "only in '{}': [{}]; only in '{}': [{}]",
            self.name,
            only_left.join(", "),
            other.name,
            only_right.join(", ")
        )))
    }

    /// Element-wise `self − other`.
    pub fn difference(&self, other: &BandTable, name: impl Into<String>) -> Result<BandTable> {
        self.ensure_same_bands(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| Some((*a)? - (*b)?))
            .collect();
        let coverage = self
            .coverage
            .iter()
            .zip(&other.coverage)
            .map(|(a, b)| a.min(*b))
            .collect();
        Ok(BandTable {
            name: name.into(),
            bands: self.bands.clone(),
            values,
            coverage,
        })
    }
}

/// Aggregate a narrowband curve (`None` = invalid bin) into bands.
pub fn band_average(
    frequencies: &[f64],
    values: &[Option<f64>],
    bands: &[ThirdOctaveBand],
    mode: BandMode,
    quantity: Quantity,
    name: impl Into<String>,
) -> Result<BandTable> {
    if frequencies.len() != values.len() {
        return Err(Error::domain(format!(
            "{} frequencies but {} values",
            frequencies.len(),
            values.len()
        )));
    }
    let mut out_values = Vec::with_capacity(bands.len());
    let mut coverage = Vec::with_capacity(bands.len());
    for band in bands {
        let in_band: Vec<Option<f64>> = frequencies
            .iter()
            .zip(values)
            .filter(|(f, _)| band.contains(**f))
            .map(|(_, v)| v.filter(|x| !x.is_nan()))
            .collect();
        let valid: Vec<f64> = in_band.iter().flatten().copied().collect();
        coverage.push(if in_band.is_empty() {
            0.0
        } else {
            valid.len() as f64 / in_band.len() as f64
        });
        out_values.push(mean_db(valid.iter(), mode == BandMode::Power, quantity));
    }
    if out_values.iter().all(Option::is_none) {
        return Err(Error::NoValidBins("no band contains a valid narrowband bin".into()));
    }
    Ok(BandTable {
        name: name.into(),
        bands: bands.to_vec(),
        values: out_values,
        coverage,
    })
}

/// Repeated runs of a per-frequency dB curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionSet {
    frequencies: Vec<f64>,
    runs: Vec<Vec<Option<f64>>>,
    labels: Vec<String>,
}

impl RepetitionSet {
    pub fn new(frequencies: Vec<f64>) -> Self {
        Self {
            frequencies,
            runs: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, run: Vec<Option<f64>>) -> Result<()> {
        if run.len() != self.frequencies.len() {
            return Err(Error::GridMismatch {
                left: self.frequencies.len(),
                right: run.len(),
            });
        }
        self.runs.push(run);
        self.labels.push(label.into());
        Ok(())
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn runs(&self) -> &[Vec<Option<f64>>] {
        &self.runs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }
}

/// Per-bin mean and sample standard deviation (in dB) over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionSummary {
    pub mean: Vec<Option<f64>>,
    pub spread: Vec<Option<f64>>,
}

pub fn average_repetitions(
    reps: &RepetitionSet,
    mode: RepetitionMode,
    quantity: Quantity,
) -> Result<RepetitionSummary> {
    if reps.is_empty() {
        return Err(Error::domain("need at least one repetition"));
    }
    let n_bins = reps.frequencies.len();
    let mut mean = Vec::with_capacity(n_bins);
    let mut spread = Vec::with_capacity(n_bins);
    for i in 0..n_bins {
        let vals: Vec<f64> = reps.runs.iter().filter_map(|r| r[i]).filter(|v| !v.is_nan()).collect();
        let m = mean_db(vals.iter(), mode == RepetitionMode::Power, quantity);
        mean.push(m);
        spread.push(m.map(|_| sample_std(&vals)));
    }
    Ok(RepetitionSummary { mean, spread })
}

fn sample_std(vals: &[f64]) -> f64 {
    if vals.len() < 2 {
        return 0.0;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// 10·log₁₀ of the mean of 10^{L/10}.
pub fn energetic_spl_average(levels: &[f64]) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::domain("cannot average an empty list of levels"));
    }
    Ok(mean_db(levels.iter(), true, Quantity::Level).expect("non-empty"))
}

/// IL = L_r0 − L_rs per band.
pub fn insertion_loss(without_sample: &BandTable, with_sample: &BandTable) -> Result<BandTable> {
    without_sample.difference(with_sample, "IL")
}
