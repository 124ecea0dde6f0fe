//! Two-microphone plane-wave decomposition.
//!
//! In each tube section the field is `p(x) = F·e^{-jkx} + G·e^{jkx}` (time
//! convention e^{jωt}). Two pressures at distinct points fix F and G unless
//! the spacing is a whole number of half wavelengths.

use num_complex::Complex64;

use crate::domain::{AirProperties, ComplexSpectrum, TubeGeometry};
use crate::error::{Error, MicPair, Result};

/// Bins with `|sin k(x_a − x_b)|` below this are treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-6;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Forward/backward amplitudes at one bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveAmplitudes {
    /// Upstream forward (incident) wave.
    pub a: Complex64,
    /// Upstream backward (reflected) wave.
    pub b: Complex64,
    /// Downstream forward (transmitted) wave.
    pub c: Complex64,
    /// Downstream backward wave, zero for an anechoic termination.
    pub d: Complex64,
}

/// A bin dropped because a microphone pair sat at a half-wavelength spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularBin {
    pub index: usize,
    pub frequency_hz: f64,
    pub pair: MicPair,
    pub sin_value: f64,
}

impl SingularBin {
    pub fn to_error(&self) -> Error {
        Error::SingularSpacing {
            pair: self.pair,
            frequency_hz: self.frequency_hz,
            sin_value: self.sin_value,
        }
    }
}

/// Result of decomposing one microphone pair over a grid.
#[derive(Debug, Clone)]
pub struct PairDecomposition {
    pub forward: Vec<Option<Complex64>>,
    pub backward: Vec<Option<Complex64>>,
    pub singular: Vec<SingularBin>,
}

/// Amplitudes for the whole tube. A bin is `None` when either pair was singular.
#[derive(Debug, Clone)]
pub struct PlaneWaveAmplitudes {
    pub frequencies: Vec<f64>,
    pub bins: Vec<Option<WaveAmplitudes>>,
    pub singular: Vec<SingularBin>,
}

impl PlaneWaveAmplitudes {
    pub fn valid_count(&self) -> usize {
        self.bins.iter().filter(|b| b.is_some()).count()
    }
}

/// Solve one bin. Returns `None` when the spacing is singular.
pub fn decompose_pair_bin(pa: Complex64, pb: Complex64, xa: f64, xb: f64, k: f64) -> Option<(Complex64, Complex64)> {
    let s = (k * (xa - xb)).sin();
    if s.abs() < SINGULAR_TOLERANCE {
        return None;
    }
    let denom = 2.0 * s;
    let forward = J * (pa * Complex64::cis(k * xb) - pb * Complex64::cis(k * xa)) / denom;
    let backward = J * (pb * Complex64::cis(-k * xa) - pa * Complex64::cis(-k * xb)) / denom;
    Some((forward, backward))
}

/// Decompose a microphone pair over the spectra's grid. `k` holds one
/// wavenumber per bin.
pub fn decompose_pair(
    pa: &ComplexSpectrum,
    pb: &ComplexSpectrum,
    xa: f64,
    xb: f64,
    k: &[f64],
    pair: MicPair,
) -> Result<PairDecomposition> {
    pa.grid().ensure_same(pb.grid())?;
    if xa == xb {
        return Err(Error::domain(format!("{pair} microphones coincide at x = {xa}")));
    }
    if k.len() != pa.len() {
        return Err(Error::domain(format!(
            "{} wavenumbers for a {}-point grid",
            k.len(),
            pa.len()
        )));
    }
    let n = pa.len();
    let mut out = PairDecomposition {
        forward: Vec::with_capacity(n),
        backward: Vec::with_capacity(n),
        singular: Vec::new(),
    };
    for (i, (&kk, f)) in k.iter().zip(pa.grid().iter()).enumerate() {
        match decompose_pair_bin(pa.values()[i], pb.values()[i], xa, xb, kk) {
            Some((fw, bw)) => {
                out.forward.push(Some(fw));
                out.backward.push(Some(bw));
            }
            None => {
                out.forward.push(None);
                out.backward.push(None);
                out.singular.push(SingularBin {
                    index: i,
                    frequency_hz: f,
                    pair,
                    sin_value: (kk * (xa - xb)).sin().abs(),
                });
            }
        }
    }
    Ok(out)
}

/// Recover (A, B) from microphones 1–2 and (C, D) from microphones 3–4.
pub fn decompose_four_mic(
    pressures: [&ComplexSpectrum; 4],
    geom: &TubeGeometry,
    air: &AirProperties,
) -> Result<PlaneWaveAmplitudes> {
    let [p1, p2, p3, p4] = pressures;
    for p in [p2, p3, p4] {
        p1.grid().ensure_same(p.grid())?;
    }
    let k = p1.grid().wavenumbers(air);
    let (x1, x2) = geom.upstream();
    let (x3, x4) = geom.downstream();
    let up = decompose_pair(p1, p2, x1, x2, &k, MicPair::Upstream)?;
    let down = decompose_pair(p3, p4, x3, x4, &k, MicPair::Downstream)?;

    let bins = (0..p1.len())
        .map(
            |i| match (up.forward[i], up.backward[i], down.forward[i], down.backward[i]) {
                (Some(a), Some(b), Some(c), Some(d)) => Some(WaveAmplitudes { a, b, c, d }),
                _ => None,
            },
        )
        .collect();
    let mut singular = up.singular;
    singular.extend(down.singular);
    singular.sort_by_key(|s| s.index);

    Ok(PlaneWaveAmplitudes {
        frequencies: p1.grid().as_slice().to_vec(),
        bins,
        singular,
    })
}

/// Pressure at `x` of the field `forward·e^{-jkx} + backward·e^{jkx}`.
pub fn pressure_at(forward: Complex64, backward: Complex64, x: f64, k: f64) -> Complex64 {
    forward * Complex64::cis(-k * x) + backward * Complex64::cis(k * x)
}
