//! Transfer-matrix reconstruction from boundary states and the acoustic
//! indicators derived from it.
//!
//! Velocities are particle velocities in m/s, so `t12` carries Pa·s/m and
//! `t21` its inverse. The indicator formulas scale both by ρ₀c.

use num_complex::Complex64;

use crate::decomposition::{PlaneWaveAmplitudes, WaveAmplitudes};
use crate::domain::AirProperties;
use crate::error::{Error, Result};
use crate::matrix::TransferMatrix;

/// Relative size below which the closure denominator counts as zero.
pub const CLOSURE_TOLERANCE: f64 = 1e-10;

/// Relative size below which an indicator denominator counts as zero.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-12;

/// Default limit on |D|/|C| for the anechoic shortcut.
pub const ANECHOIC_THRESHOLD: f64 = 0.01;

/// Pressure and particle velocity at one face of the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryState {
    pub pressure: Complex64,
    pub velocity: Complex64,
}

/// States at x = 0 and x = d from the decomposed amplitudes.
pub fn boundary_states(
    amps: &WaveAmplitudes,
    k: f64,
    thickness: f64,
    air: &AirProperties,
) -> (BoundaryState, BoundaryState) {
    let z = air.characteristic_impedance();
    let fwd = amps.c * Complex64::cis(-k * thickness);
    let bwd = amps.d * Complex64::cis(k * thickness);
    (
        BoundaryState {
            pressure: amps.a + amps.b,
            velocity: (amps.a - amps.b) / z,
        },
        BoundaryState {
            pressure: fwd + bwd,
            velocity: (fwd - bwd) / z,
        },
    )
}

/// Close the 2×2 system from a single measured load using t11 = t22 and
/// det = 1.
pub fn reconstruct_one_load(entry: &BoundaryState, exit: &BoundaryState) -> Result<TransferMatrix> {
    let (p0, v0) = (entry.pressure, entry.velocity);
    let (pd, vd) = (exit.pressure, exit.velocity);

    let w_v = (p0 * vd).norm();
    let w_p = (pd * v0).norm();
    let denom = p0 * vd + pd * v0;
    let scale = w_v + w_p;
    if !(scale > 0.0) || denom.norm() < CLOSURE_TOLERANCE * scale {
        return Err(Error::ClosureSingular {
            denominator: denom.norm(),
        });
    }

    let diag = (p0 * v0 + pd * vd) / denom;
    let one = Complex64::new(1.0, 0.0);
    // Solve the better conditioned off-diagonal directly, the other from det = 1
    // when its own face quantity vanishes.
    let (t12, t21) = if w_v >= w_p {
        let t12 = (p0 - diag * pd) / vd;
        let t21 = if w_p > 1e-8 * w_v {
            (v0 - diag * vd) / pd
        } else if t12.norm() > 0.0 {
            (diag * diag - one) / t12
        } else {
            return Err(Error::ClosureSingular {
                denominator: denom.norm(),
            });
        };
        (t12, t21)
    } else {
        let t21 = (v0 - diag * vd) / pd;
        let t12 = if w_v > 1e-8 * w_p {
            (p0 - diag * pd) / vd
        } else if t21.norm() > 0.0 {
            (diag * diag - one) / t21
        } else {
            return Err(Error::ClosureSingular {
                denominator: denom.norm(),
            });
        };
        (t12, t21)
    };
    Ok(TransferMatrix::new(diag, t12, t21, diag))
}

fn anechoic_terms(t: &TransferMatrix, air: &AirProperties) -> [Complex64; 4] {
    let z = air.characteristic_impedance();
    [t.t11, t.t12 / z, t.t21 * z, t.t22]
}

fn checked_denominator(terms: &[Complex64]) -> Option<Complex64> {
    let sum: Complex64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if scale > 0.0 && sum.norm() >= DENOMINATOR_TOLERANCE * scale && sum.norm() > 0.0 {
        Some(sum)
    } else {
        None
    }
}

/// Transmission coefficient C/A for an anechoic termination. `None` where the
/// denominator vanishes.
pub fn transmission_coefficient(t: &TransferMatrix, k: f64, thickness: f64, air: &AirProperties) -> Option<Complex64> {
    let den = checked_denominator(&anechoic_terms(t, air))?;
    Some(2.0 * Complex64::cis(k * thickness) / den)
}

/// Reflection coefficient B/A for an anechoic termination.
pub fn reflection_coefficient_anechoic(t: &TransferMatrix, air: &AirProperties) -> Option<Complex64> {
    let [a, b, c, d] = anechoic_terms(t, air);
    let den = checked_denominator(&[a, b, c, d])?;
    Some((a + b - c - d) / den)
}

/// Normal surface impedance; infinite for a rigid (R = 1) face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceImpedance {
    Finite(Complex64),
    Infinite,
}

impl SurfaceImpedance {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            SurfaceImpedance::Finite(z) => Some(*z),
            SurfaceImpedance::Infinite => None,
        }
    }
}

/// Z = ρ₀c(1 + R)/(1 − R).
pub fn surface_impedance_anechoic(reflection: Complex64, air: &AirProperties) -> SurfaceImpedance {
    let gap = Complex64::new(1.0, 0.0) - reflection;
    if gap.norm() < DENOMINATOR_TOLERANCE {
        return SurfaceImpedance::Infinite;
    }
    SurfaceImpedance::Finite(air.characteristic_impedance() * (1.0 + reflection) / gap)
}

/// P/V at the entry face read straight off the matrix with an anechoic load:
/// (t11 + t12/ρ₀c)/(t21 + t22/ρ₀c). Independent route to
/// [`surface_impedance_anechoic`].
pub fn surface_impedance_from_matrix(t: &TransferMatrix, air: &AirProperties) -> SurfaceImpedance {
    let z = air.characteristic_impedance();
    let num = t.t11 + t.t12 / z;
    let den = t.t21 + t.t22 / z;
    if den.norm() <= DENOMINATOR_TOLERANCE * (t.t21.norm() + t.t22.norm() / z) || den.norm() == 0.0 {
        return SurfaceImpedance::Infinite;
    }
    SurfaceImpedance::Finite(num / den)
}

/// Reflection coefficient with a rigid wall directly behind the sample.
pub fn rigid_backing_reflection(t: &TransferMatrix, air: &AirProperties) -> Option<Complex64> {
    let zt21 = t.t21 * air.characteristic_impedance();
    let den = checked_denominator(&[t.t11, zt21])?;
    Some((t.t11 - zt21) / den)
}

/// 10·log₁₀(1/|τ|²) in dB; +∞ when nothing is transmitted.
pub fn stl(transmission: Complex64) -> f64 {
    let power = transmission.norm_sqr();
    if power == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * power.log10()
    }
}

/// STL from the amplitude ratio A/C alone, valid when the termination is anechoic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectStl {
    pub stl_db: f64,
    /// |D|/|C|; above the threshold the anechoic assumption does not hold.
    pub anechoic_ratio: f64,
    pub anechoic_ok: bool,
}

pub fn stl_direct_bin(amps: &WaveAmplitudes, threshold: f64) -> Result<DirectStl> {
    if amps.a.norm() == 0.0 {
        return Err(Error::domain("incident amplitude A is zero"));
    }
    let c = amps.c.norm();
    let (stl_db, ratio) = if c == 0.0 {
        (f64::INFINITY, if amps.d.norm() == 0.0 { 0.0 } else { f64::INFINITY })
    } else {
        (20.0 * (amps.a.norm() / c).log10(), amps.d.norm() / c)
    };
    Ok(DirectStl {
        stl_db,
        anechoic_ratio: ratio,
        anechoic_ok: ratio <= threshold,
    })
}

/// Per-bin direct STL; `None` at singular bins or where A = 0.
pub fn stl_direct_anechoic(amps: &PlaneWaveAmplitudes, threshold: f64) -> Vec<Option<DirectStl>> {
    amps.bins
        .iter()
        .map(|b| b.as_ref().and_then(|w| stl_direct_bin(w, threshold).ok()))
        .collect()
}

/// Every indicator for one bin. Fields are `None` where undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticIndicators {
    pub transmission: Option<Complex64>,
    pub reflection: Option<Complex64>,
    pub impedance: Option<SurfaceImpedance>,
    pub rigid_reflection: Option<Complex64>,
    pub stl_db: Option<f64>,
}

pub fn indicators(t: &TransferMatrix, k: f64, thickness: f64, air: &AirProperties) -> AcousticIndicators {
    let transmission = transmission_coefficient(t, k, thickness, air);
    let reflection = reflection_coefficient_anechoic(t, air);
    AcousticIndicators {
        transmission,
        reflection,
        impedance: reflection.map(|r| surface_impedance_anechoic(r, air)),
        rigid_reflection: rigid_backing_reflection(t, air),
        stl_db: transmission.map(stl),
    }
}
