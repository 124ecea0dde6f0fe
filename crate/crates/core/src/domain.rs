//! Shared domain types: air, tube geometry, frequency grids, spectra and materials.
//!
//! Everything here is SI (m, Hz, Pa, kg). Millimetres only appear in
//! constructors named `*_mm`, which convert at the boundary.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// First zero of J1', giving the cutoff of the first non-planar mode in a circular duct.
const CIRCULAR_DUCT_CUTOFF_FACTOR: f64 = 1.841;

pub const DEFAULT_DENSITY: f64 = 1.204;
pub const DEFAULT_SOUND_SPEED: f64 = 343.2;

/// Properties of the air filling the tube.
///
/// Temperature and humidity are carried along for reporting only; they do
/// not feed back into density or sound speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirProperties {
    density: f64,
    sound_speed: f64,
    temperature_c: Option<f64>,
    relative_humidity: Option<f64>,
}

impl AirProperties {
    pub fn new(density: f64, sound_speed: f64) -> Result<Self> {
        if !(density.is_finite() && density > 0.0) {
            return Err(Error::domain(format!("air density must be positive, got {density}")));
        }
        if !(sound_speed.is_finite() && sound_speed > 0.0) {
            return Err(Error::domain(format!(
                "sound speed must be positive, got {sound_speed}"
            )));
        }
        Ok(Self {
            density,
            sound_speed,
            temperature_c: None,
            relative_humidity: None,
        })
    }

    pub fn with_environment(mut self, temperature_c: Option<f64>, relative_humidity: Option<f64>) -> Self {
        self.temperature_c = temperature_c;
        self.relative_humidity = relative_humidity;
        self
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn temperature_c(&self) -> Option<f64> {
        self.temperature_c
    }

    pub fn relative_humidity(&self) -> Option<f64> {
        self.relative_humidity
    }

    /// Characteristic impedance ρ₀c in Pa·s/m.
    pub fn characteristic_impedance(&self) -> f64 {
        self.density * self.sound_speed
    }
}

impl Default for AirProperties {
    fn default() -> Self {
        Self {
            density: DEFAULT_DENSITY,
            sound_speed: DEFAULT_SOUND_SPEED,
            temperature_c: None,
            relative_humidity: None,
        }
    }
}

/// Microphone layout and sample dimensions of a four-microphone tube.
///
/// Coordinates share one axis with the sample: its upstream face sits at
/// x = 0 and its downstream face at x = d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeGeometry {
    mic_positions: [f64; 4],
    sample_thickness: f64,
    tube_diameter: f64,
}

impl TubeGeometry {
    pub fn new(mic_positions: [f64; 4], sample_thickness: f64, tube_diameter: f64) -> Result<Self> {
        let [x1, x2, x3, x4] = mic_positions;
        if mic_positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("microphone positions must be finite"));
        }
        if !(x1 < x2) {
            return Err(Error::domain(format!(
                "upstream microphones need x1 < x2, got {x1} and {x2}"
            )));
        }
        if !(x3 < x4) {
            return Err(Error::domain(format!(
                "downstream microphones need x3 < x4, got {x3} and {x4}"
            )));
        }
        if !(sample_thickness.is_finite() && sample_thickness > 0.0) {
            return Err(Error::domain(format!(
                "sample thickness must be positive, got {sample_thickness}"
            )));
        }
        if !(tube_diameter.is_finite() && tube_diameter > 0.0) {
            return Err(Error::domain(format!(
                "tube diameter must be positive, got {tube_diameter}"
            )));
        }
        Ok(Self {
            mic_positions,
            sample_thickness,
            tube_diameter,
        })
    }

    pub fn mic_positions(&self) -> [f64; 4] {
        self.mic_positions
    }

    pub fn upstream(&self) -> (f64, f64) {
        (self.mic_positions[0], self.mic_positions[1])
    }

    pub fn downstream(&self) -> (f64, f64) {
        (self.mic_positions[2], self.mic_positions[3])
    }

    pub fn sample_thickness(&self) -> f64 {
        self.sample_thickness
    }

    pub fn tube_diameter(&self) -> f64 {
        self.tube_diameter
    }
}

/// Strictly increasing, positive frequencies in Hz.
///
/// Cloning is cheap; clones share storage. Two grids are equal when their
/// frequencies are identical.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    freqs: Arc<[f64]>,
}

impl FrequencyGrid {
    pub fn new(freqs: Vec<f64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::domain("frequency grid is empty"));
        }
        for (i, &f) in freqs.iter().enumerate() {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::domain(format!(
                    "frequency #{i} must be positive and finite, got {f}"
                )));
            }
            if i > 0 && f <= freqs[i - 1] {
                return Err(Error::domain(format!(
                    "frequencies must be strictly increasing ({} then {f})",
                    freqs[i - 1]
                )));
            }
        }
        Ok(Self { freqs: freqs.into() })
    }

    /// Evenly spaced grid `start, start + step, ...` up to and including `stop`
    /// (within a small tolerance on the last point).
    pub fn linear(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(stop >= start) {
            return Err(Error::domain(format!("bad linear grid {start}..{stop} step {step}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Self::new((0..n).map(|i| start + i as f64 * step).collect())
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.freqs
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.freqs.iter().copied()
    }

    pub fn wavenumbers(&self, air: &AirProperties) -> Vec<f64> {
        self.freqs.iter().map(|&f| 2.0 * PI * f / air.sound_speed()).collect()
    }

    pub fn ensure_same(&self, other: &FrequencyGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }
}

impl PartialEq for FrequencyGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.freqs, &other.freqs) || self.freqs == other.freqs
    }
}

/// Complex values (pressures in Pa, or dimensionless coefficients) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "spectrum has {} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::domain(format!("spectrum value #{i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `alpha·self + beta·other`, on the shared grid.
    pub fn combine(&self, alpha: Complex64, other: &ComplexSpectrum, beta: Complex64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        ComplexSpectrum::new(self.grid.clone(), values)
    }
}

/// A sheet material as listed in a material catalogue.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSpec {
    name: String,
    thickness: f64,
    surface_density: f64,
    bulk_density: Option<f64>,
}

impl MaterialSpec {
    /// Relative tolerance between a stored surface density and thickness × bulk density.
    pub const CONSISTENCY_TOLERANCE: f64 = 0.01;

    pub fn new(
        name: impl Into<String>,
        thickness: f64,
        surface_density: f64,
        bulk_density: Option<f64>,
    ) -> Result<Self> {
        let name = name.into();
        if !(thickness.is_finite() && thickness > 0.0) {
            return Err(Error::domain(format!(
                "{name}: thickness must be positive, got {thickness}"
            )));
        }
        if !(surface_density.is_finite() && surface_density > 0.0) {
            return Err(Error::domain(format!(
                "{name}: surface density must be positive, got {surface_density}"
            )));
        }
        if let Some(rho) = bulk_density {
            let implied = surface_density_of(thickness, rho)?;
            let rel = (implied - surface_density).abs() / surface_density;
            if rel > Self::CONSISTENCY_TOLERANCE {
                return Err(Error::domain(format!(
                    "{name}: surface density {surface_density} kg/m² disagrees with thickness × density = {implied:.4} kg/m²"
                )));
            }
        }
        Ok(Self {
            name,
            thickness,
            surface_density,
            bulk_density,
        })
    }

    pub fn from_mm(name: impl Into<String>, thickness_mm: f64, surface_density: f64) -> Result<Self> {
        Self::new(name, thickness_mm / 1000.0, surface_density, None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Thickness in metres.
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn surface_density(&self) -> f64 {
        self.surface_density
    }

    pub fn bulk_density(&self) -> Option<f64> {
        self.bulk_density
    }

    /// Bulk density implied by surface density and thickness.
    pub fn implied_bulk_density(&self) -> f64 {
        self.surface_density / self.thickness
    }
}

/// The nine curtain materials of the reference measurement campaign
/// (thickness in mm, surface density in kg/m²).
#[allow(clippy::approx_constant)]
pub const CURTAIN_MATERIALS: [(&str, f64, f64); 9] = [
    ("Woolen felt (woven, soft)", 1.235, 0.213),
    ("Woolen felt (woven, stiff)", 1.922, 0.252),
    ("TANGO curtain", 0.57, 0.224),
    ("100% polyester hospital curtain", 0.6, 0.229),
    ("Elephant mat (type I)", 2.276, 0.318),
    ("Elephant mat (type II)", 1.682, 0.366),
    ("Textured soft liner (GRIP)", 1.65, 0.644),
    ("PVC coated polyester (PE) fabric", 0.89, 1.135),
    ("100% pure PVC sheet", 1.012, 1.216),
];

pub fn curtain_materials() -> Vec<MaterialSpec> {
    CURTAIN_MATERIALS
        .iter()
        .map(|&(name, mm, ms)| MaterialSpec::from_mm(name, mm, ms).expect("catalogue entries are valid"))
        .collect()
}

/// Wavenumber 2πf/c in rad/m (lossless).
pub fn wavenumber(frequency_hz: f64, air: &AirProperties) -> Result<f64> {
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(Error::domain(format!("frequency must be positive, got {frequency_hz}")));
    }
    Ok(2.0 * PI * frequency_hz / air.sound_speed())
}

/// Lowest frequency at which the first non-planar mode propagates.
pub fn plane_wave_cutoff(geom: &TubeGeometry, air: &AirProperties) -> f64 {
    CIRCULAR_DUCT_CUTOFF_FACTOR * air.sound_speed() / (PI * geom.tube_diameter())
}

/// Surface density in kg/m² from thickness (m) and bulk density (kg/m³).
pub fn surface_density_of(thickness: f64, density: f64) -> Result<f64> {
    if !(thickness > 0.0 && density > 0.0) {
        return Err(Error::domain(format!(
            "thickness and density must be positive, got {thickness} m and {density} kg/m³"
        )));
    }
    Ok(thickness * density)
}
