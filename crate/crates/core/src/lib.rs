//! Plane-wave impedance-tube analysis: four-microphone wave decomposition,
//! one-load transfer-matrix reconstruction, analytic layer models and
//! one-third-octave band processing.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod config;
pub mod decomposition;
pub mod domain;
pub mod error;
pub mod formats;
pub mod matrix;
pub mod models;
pub mod pipeline;
pub mod synth;
pub mod transfer;

pub use bands::{BandMode, BandTable, Quantity, RepetitionMode, RepetitionSet, ThirdOctaveBand};
pub use config::TubeConfig;
pub use decomposition::{PlaneWaveAmplitudes, WaveAmplitudes};
pub use domain::{AirProperties, ComplexSpectrum, FrequencyGrid, MaterialSpec, TubeGeometry};
pub use error::{Error, ErrorClass, MicPair, Result};
pub use matrix::TransferMatrix;
pub use models::{LayerModel, MassLawConstant};
pub use pipeline::{analyze, Analysis, Warning};
pub use synth::{Sample, SynthScenario};
pub use transfer::AcousticIndicators;
