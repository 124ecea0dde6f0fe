//! TOML configuration for the tube and the air inside it.
//!
//! ```toml
//! [air]
//! density = 1.204            # kg/m³
//! sound_speed = 343.2        # m/s
//! temperature_c = 23.7       # informational
//! relative_humidity = 66.3   # informational
//!
//! [tube]
//! mic_positions = [-0.25, -0.2, 0.05, 0.1]   # m, sample faces at 0 and d
//! sample_thickness_mm = 0.89                 # or sample_thickness in m
//! diameter = 0.0998                          # m
//! ```
//!
//! `[air]` is optional and falls back to 1.204 kg/m³ and 343.2 m/s. There is
//! no default microphone layout.

use serde::{Deserialize, Serialize};

use crate::domain::{AirProperties, TubeGeometry, DEFAULT_DENSITY, DEFAULT_SOUND_SPEED};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AirSection {
    pub density: Option<f64>,
    pub sound_speed: Option<f64>,
    pub temperature_c: Option<f64>,
    pub relative_humidity: Option<f64>,
}

impl AirSection {
    pub fn build(&self) -> Result<AirProperties> {
        Ok(AirProperties::new(
            self.density.unwrap_or(DEFAULT_DENSITY),
            self.sound_speed.unwrap_or(DEFAULT_SOUND_SPEED),
        )?
        .with_environment(self.temperature_c, self.relative_humidity))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TubeSection {
    pub mic_positions: [f64; 4],
    pub sample_thickness: Option<f64>,
    pub sample_thickness_mm: Option<f64>,
    pub diameter: Option<f64>,
    pub diameter_mm: Option<f64>,
}

fn metres(name: &str, m: Option<f64>, mm: Option<f64>) -> Result<f64> {
    match (m, mm) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v / 1000.0),
        (Some(_), Some(_)) => Err(Error::Config(format!("give either {name} or {name}_mm, not both"))),
        (None, None) => Err(Error::Config(format!("missing {name}"))),
    }
}

impl TubeSection {
    pub fn build(&self) -> Result<TubeGeometry> {
        let d = metres("sample_thickness", self.sample_thickness, self.sample_thickness_mm)?;
        let dia = metres("diameter", self.diameter, self.diameter_mm)?;
        TubeGeometry::new(self.mic_positions, d, dia)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub air: AirSection,
    pub tube: TubeSection,
}

/// Validated run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeConfig {
    pub air: AirProperties,
    pub geometry: TubeGeometry,
}

impl TubeConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self {
            air: raw.air.build()?,
            geometry: raw.tube.build()?,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML in SI units; equal configs give identical text.
    pub fn to_toml_string(&self) -> String {
        let raw = ConfigFile {
            air: AirSection {
                density: Some(self.air.density()),
                sound_speed: Some(self.air.sound_speed()),
                temperature_c: self.air.temperature_c(),
                relative_humidity: self.air.relative_humidity(),
            },
            tube: TubeSection {
                mic_positions: self.geometry.mic_positions(),
                sample_thickness: Some(self.geometry.sample_thickness()),
                sample_thickness_mm: None,
                diameter: Some(self.geometry.tube_diameter()),
                diameter_mm: None,
            },
        };
        toml::to_string(&raw).expect("config serializes")
    }
}
