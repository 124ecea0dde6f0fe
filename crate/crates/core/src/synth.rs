//! Synthetic measurements from known samples: four-microphone spectra for the
//! tube and idealized receiver-room levels for insertion loss.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bands::BandTable;
use crate::decomposition::{pressure_at, WaveAmplitudes};
use crate::domain::{AirProperties, ComplexSpectrum, FrequencyGrid, TubeGeometry};
use crate::error::{Error, Result};
use crate::matrix::TransferMatrix;
use crate::models::LayerModel;

#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Layers(Vec<LayerModel>),
    Matrix(TransferMatrix),
}

impl Sample {
    fn matrix(&self, frequency_hz: f64, air: &AirProperties) -> Result<TransferMatrix> {
        match self {
            Sample::Layers(layers) => layers.iter().try_fold(TransferMatrix::identity(), |acc, l| {
                Ok(acc * l.matrix(frequency_hz, air)?)
            }),
            Sample::Matrix(m) => Ok(*m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthScenario {
    pub sample: Sample,
    pub geometry: TubeGeometry,
    pub air: AirProperties,
    /// Incident amplitude A in Pa.
    pub incident: Complex64,
    /// Downstream ratio D/C; zero is anechoic.
    pub termination: Complex64,
    /// Signal-to-noise ratio in dB relative to |A|; `None` is noiseless.
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl SynthScenario {
    pub fn validate(&self) -> Result<()> {
        if self.termination.norm() >= 1.0 {
            return Err(Error::domain(format!(
                "termination |D/C| = {} must be below 1",
                self.termination.norm()
            )));
        }
        if self.incident.norm() == 0.0 || !self.incident.re.is_finite() || !self.incident.im.is_finite() {
            return Err(Error::domain("incident amplitude must be finite and non-zero"));
        }
        if let Sample::Layers(l) = &self.sample {
            if l.is_empty() {
                return Err(Error::domain("sample has no layers"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub pressures: [ComplexSpectrum; 4],
    /// Noise-free amplitudes used to build the pressures.
    pub truth: Vec<WaveAmplitudes>,
}

/// Amplitudes of the steady field around `t` under incident amplitude `incident`
/// and termination ratio D/C = `termination`.
pub fn field_amplitudes(
    t: &TransferMatrix,
    k: f64,
    thickness: f64,
    air: &AirProperties,
    incident: Complex64,
    termination: Complex64,
) -> Result<WaveAmplitudes> {
    let z = air.characteristic_impedance();
    // unit transmitted wave, then rescale to the requested incidence
    let fwd = Complex64::cis(-k * thickness);
    let bwd = termination * Complex64::cis(k * thickness);
    let (p0, v0) = t.apply(fwd + bwd, (fwd - bwd) / z);
    let a_unit = (p0 + z * v0) / 2.0;
    let b_unit = (p0 - z * v0) / 2.0;
    if a_unit.norm() == 0.0 {
        return Err(Error::domain("sample blocks the incident wave entirely"));
    }
    let scale = incident / a_unit;
    Ok(WaveAmplitudes {
        a: incident,
        b: b_unit * scale,
        c: scale,
        d: termination * scale,
    })
}

pub fn synth_mic_pressures(scenario: &SynthScenario, grid: &FrequencyGrid) -> Result<SynthOutput> {
    scenario.validate()?;
    let air = &scenario.air;
    let d = scenario.geometry.sample_thickness();
    let xs = scenario.geometry.mic_positions();
    let sigma = scenario
        .snr_db
        .map(|snr| scenario.incident.norm() * 10f64.powf(-snr / 20.0));

    let mut channels: [Vec<Complex64>; 4] = Default::default();
    let mut truth = Vec::with_capacity(grid.len());
    for (bin, (f, k)) in grid.iter().zip(grid.wavenumbers(air)).enumerate() {
        let t = scenario.sample.matrix(f, air)?;
        let w = field_amplitudes(&t, k, d, air, scenario.incident, scenario.termination)?;
        let mut rng = sigma.map(|_| {
            let mut r = ChaCha8Rng::seed_from_u64(scenario.seed);
            r.set_stream(bin as u64);
            r
        });
        for (m, ch) in channels.iter_mut().enumerate() {
            let (fw, bw) = if m < 2 { (w.a, w.b) } else { (w.c, w.d) };
            let mut p = pressure_at(fw, bw, xs[m], k);
            if let (Some(s), Some(r)) = (sigma, rng.as_mut()) {
                let re: f64 = StandardNormal.sample(r);
                let im: f64 = StandardNormal.sample(r);
                p += Complex64::new(re, im) * (s / std::f64::consts::SQRT_2);
            }
            ch.push(p);
        }
        truth.push(w);
    }
    let [c1, c2, c3, c4] = channels;
    Ok(SynthOutput {
        pressures: [
            ComplexSpectrum::new(grid.clone(), c1)?,
            ComplexSpectrum::new(grid.clone(), c2)?,
            ComplexSpectrum::new(grid.clone(), c3)?,
            ComplexSpectrum::new(grid.clone(), c4)?,
        ],
        truth,
    })
}

/// Receiver-room levels before (L_r0) and after (L_rs) installing a specimen
/// whose band transmission loss is `transmission`, with no flanking paths.
pub fn synth_room_levels(source: &BandTable, transmission: &BandTable) -> Result<(BandTable, BandTable)> {
    source.ensure_same_bands(transmission)?;
    let mut without = source.clone();
    without.name = "L_r0".to_string();
    let mut with = source.difference(transmission, "L_rs")?;
    with.coverage = source.coverage.clone();
    Ok((without, with))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::{insertion_loss, third_octave_bands};
    use crate::models::mass_law_stl;
    use crate::transfer::{reflection_coefficient_anechoic, transmission_coefficient};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scenario(sample: Sample) -> SynthScenario {
        SynthScenario {
            sample,
            geometry: TubeGeometry::new([-0.2, -0.15, 0.05, 0.1], 0.001, 0.0998).unwrap(),
            air: AirProperties::default(),
            incident: c(1.0, 0.0),
            termination: c(0.0, 0.0),
            snr_db: None,
            seed: 7,
        }
    }

    #[test]
    fn anechoic_field_matches_indicator_formulas() {
        let air = AirProperties::default();
        let m = LayerModel::limp(1.135).unwrap().matrix(800.0, &air).unwrap();
        let k = 2.0 * std::f64::consts::PI * 800.0 / air.sound_speed();
        let w = field_amplitudes(&m, k, 0.002, &air, c(0.5, 0.5), c(0.0, 0.0)).unwrap();
        let ta = transmission_coefficient(&m, k, 0.002, &air).unwrap();
        let ra = reflection_coefficient_anechoic(&m, &air).unwrap();
        assert!((w.c - ta * w.a).norm() < 1e-12);
        assert!((w.b - ra * w.a).norm() < 1e-12);
        assert_eq!(w.d, c(0.0, 0.0));
    }

    #[test]
    fn termination_must_be_below_unity() {
        let mut s = scenario(Sample::Layers(vec![LayerModel::Identity]));
        s.termination = c(0.0, 1.0);
        let grid = FrequencyGrid::new(vec![500.0]).unwrap();
        assert!(synth_mic_pressures(&s, &grid).is_err());
    }

    #[test]
    fn seeded_noise_is_deterministic() {
        let mut s = scenario(Sample::Layers(vec![LayerModel::limp(1.135).unwrap()]));
        s.snr_db = Some(40.0);
        let grid = FrequencyGrid::linear(100.0, 500.0, 50.0).unwrap();
        let a = synth_mic_pressures(&s, &grid).unwrap();
        let b = synth_mic_pressures(&s, &grid).unwrap();
        for (x, y) in a.pressures.iter().zip(&b.pressures) {
            assert_eq!(x, y);
        }
        s.seed = 8;
        let c2 = synth_mic_pressures(&s, &grid).unwrap();
        assert_ne!(a.pressures[0], c2.pressures[0]);

        // a bin does not depend on which other bins are generated
        let sub = FrequencyGrid::new(grid.as_slice()[..3].to_vec()).unwrap();
        s.seed = 7;
        let part = synth_mic_pressures(&s, &sub).unwrap();
        assert_eq!(part.pressures[2].values()[2], a.pressures[2].values()[2]);
    }

    #[test]
    fn room_levels_examples() {
        let bands = third_octave_bands(100.0, 5000.0).unwrap();
        let source = BandTable::new(
            "src",
            bands.clone(),
            (0..18).map(|i| Some(80.0 - i as f64 * 0.5)).collect(),
        )
        .unwrap();
        let zero = BandTable::new("tl", bands.clone(), vec![Some(0.0); 18]).unwrap();
        let (r0, rs) = synth_room_levels(&source, &zero).unwrap();
        assert_eq!(r0.values, rs.values);

        let flat = BandTable::new("tl", bands.clone(), vec![Some(11.0); 18]).unwrap();
        let (r0, rs) = synth_room_levels(&source, &flat).unwrap();
        let il = insertion_loss(&r0, &rs).unwrap();
        assert!(il.values.iter().all(|v| (v.unwrap() - 11.0).abs() < 1e-12));

        let ml: Vec<Option<f64>> = bands
            .iter()
            .map(|b| Some(mass_law_stl(b.nominal_hz, 1.216).unwrap()))
            .collect();
        let ml = BandTable::new("ml", bands.clone(), ml).unwrap();
        let (r0, rs) = synth_room_levels(&source, &ml).unwrap();
        let il = insertion_loss(&r0, &rs).unwrap();
        for (x, y) in il.values.iter().zip(&ml.values) {
            assert!((x.unwrap() - y.unwrap()).abs() < 1e-12);
        }

        let short = BandTable::new("tl", third_octave_bands(100.0, 200.0).unwrap(), vec![Some(0.0); 4]).unwrap();
        assert!(synth_room_levels(&source, &short).is_err());
    }
}
