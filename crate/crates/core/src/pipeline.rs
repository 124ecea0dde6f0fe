//! Four-microphone spectra → amplitudes → transfer matrix → indicators, one
//! measurement at a time.

use std::fmt;

use crate::decomposition::{decompose_four_mic, PlaneWaveAmplitudes};
use crate::domain::{plane_wave_cutoff, AirProperties, ComplexSpectrum, TubeGeometry};
use crate::error::{Error, MicPair, Result};
use crate::matrix::TransferMatrix;
use crate::transfer::{
    boundary_states, indicators, reconstruct_one_load, stl_direct_bin, AcousticIndicators, DirectStl,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinResult {
    pub matrix: TransferMatrix,
    pub indicators: AcousticIndicators,
    pub direct: Option<DirectStl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    SingularSpacing(MicPair),
    ClosureSingular,
    TransmissionUndefined,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExclusionReason::SingularSpacing(p) => write!(f, "{p} pair at half-wavelength spacing"),
            ExclusionReason::ClosureSingular => f.write_str("one-load closure singular"),
            ExclusionReason::TransmissionUndefined => f.write_str("transmission denominator vanishes"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excluded {
    pub index: usize,
    pub frequency_hz: f64,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    AboveCutoff {
        cutoff_hz: f64,
        bins: usize,
        first_hz: f64,
    },
    Excluded(Excluded),
    AnechoicQuality {
        bins: usize,
        worst_ratio: f64,
        worst_hz: f64,
        threshold: f64,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::AboveCutoff { cutoff_hz, bins, first_hz } => write!(
                f,
                "{bins} bin(s) from {first_hz} Hz lie above the plane-wave cutoff of {cutoff_hz:.1} Hz"
            ),
            Warning::Excluded(e) => write!(f, "bin at {} Hz excluded: {}", e.frequency_hz, e.reason),
            Warning::AnechoicQuality { bins, worst_ratio, worst_hz, threshold } => write!(
                f,
                "{bins} bin(s) exceed |D|/|C| = {threshold} (worst {worst_ratio:.4} at {worst_hz} Hz); direct STL is unreliable there"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub frequencies: Vec<f64>,
    pub amplitudes: PlaneWaveAmplitudes,
    pub bins: Vec<Option<BinResult>>,
    pub excluded: Vec<Excluded>,
    pub warnings: Vec<Warning>,
}

impl Analysis {
    /// Matrix-route STL per bin, `None` where excluded.
    pub fn stl(&self) -> Vec<Option<f64>> {
        self.bins
            .iter()
            .map(|b| b.as_ref().and_then(|r| r.indicators.stl_db))
            .collect()
    }

    pub fn valid_count(&self) -> usize {
        self.bins.iter().filter(|b| b.is_some()).count()
    }
}

/// Run the full per-bin chain on one set of microphone spectra.
pub fn analyze(
    pressures: [&ComplexSpectrum; 4],
    geom: &TubeGeometry,
    air: &AirProperties,
    anechoic_threshold: f64,
) -> Result<Analysis> {
    let amplitudes = decompose_four_mic(pressures, geom, air)?;
    let grid = pressures[0].grid();
    let d = geom.sample_thickness();
    let mut excluded: Vec<Excluded> = amplitudes
        .singular
        .iter()
        .map(|s| Excluded {
            index: s.index,
            frequency_hz: s.frequency_hz,
            reason: ExclusionReason::SingularSpacing(s.pair),
        })
        .collect();
    // a bin singular on both pairs is reported once
    excluded.dedup_by_key(|e| e.index);

    let mut bins = Vec::with_capacity(grid.len());
    for (i, (f, k)) in grid.iter().zip(grid.wavenumbers(air)).enumerate() {
        let Some(w) = amplitudes.bins[i] else {
            bins.push(None);
            continue;
        };
        let (entry, exit) = boundary_states(&w, k, d, air);
        let matrix = match reconstruct_one_load(&entry, &exit) {
            Ok(m) => m,
            Err(_) => {
                excluded.push(Excluded {
                    index: i,
                    frequency_hz: f,
                    reason: ExclusionReason::ClosureSingular,
                });
                bins.push(None);
                continue;
            }
        };
        let ind = indicators(&matrix, k, d, air);
        if ind.stl_db.is_none() {
            excluded.push(Excluded {
                index: i,
                frequency_hz: f,
                reason: ExclusionReason::TransmissionUndefined,
            });
            bins.push(None);
            continue;
        }
        bins.push(Some(BinResult {
            matrix,
            indicators: ind,
            direct: stl_direct_bin(&w, anechoic_threshold).ok(),
        }));
    }
    excluded.sort_by_key(|e| e.index);

    let mut warnings = Vec::new();
    let cutoff = plane_wave_cutoff(geom, air);
    let above: Vec<f64> = grid.iter().filter(|&f| f > cutoff).collect();
    if let Some(&first_hz) = above.first() {
        warnings.push(Warning::AboveCutoff {
            cutoff_hz: cutoff,
            bins: above.len(),
            first_hz,
        });
    }
    warnings.extend(excluded.iter().copied().map(Warning::Excluded));
    let poor: Vec<(f64, f64)> = bins
        .iter()
        .zip(grid.iter())
        .filter_map(|(b, f)| {
            b.as_ref()?
                .direct
                .filter(|d| !d.anechoic_ok)
                .map(|d| (f, d.anechoic_ratio))
        })
        .collect();
    if let Some(&(worst_hz, worst_ratio)) = poor.iter().max_by(|a, b| a.1.total_cmp(&b.1)) {
        warnings.push(Warning::AnechoicQuality {
            bins: poor.len(),
            worst_ratio,
            worst_hz,
            threshold: anechoic_threshold,
        });
    }

    let analysis = Analysis {
        frequencies: grid.as_slice().to_vec(),
        amplitudes,
        bins,
        excluded,
        warnings,
    };
    if analysis.valid_count() == 0 {
        return Err(Error::NoValidBins(format!(
            "all {} bins were excluded",
            analysis.frequencies.len()
        )));
    }
    Ok(analysis)
}
