//! Closed-form layer models: mass law, limp mass, air gap, and cascades of layers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{AirProperties, FrequencyGrid};
use crate::error::{Error, Result};
use crate::matrix::TransferMatrix;
use crate::transfer::{stl, transmission_coefficient};

/// Field-incidence empirical mass-law offset in dB.
pub const PAPER_MASS_LAW_CONSTANT: f64 = -48.0;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which additive constant the mass law uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassLawConstant {
    /// Empirical field-incidence form, 20·log₁₀(f·m) − 48.
    Paper,
    /// High-frequency asymptote of the normal-incidence limp mass, 20·log₁₀(π f m / ρ₀c).
    Normal,
}

impl MassLawConstant {
    pub fn offset_db(self, air: &AirProperties) -> f64 {
        match self {
            MassLawConstant::Paper => PAPER_MASS_LAW_CONSTANT,
            MassLawConstant::Normal => 20.0 * (PI / air.characteristic_impedance()).log10(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MassLawConstant::Paper => "mass-law-paper",
            MassLawConstant::Normal => "mass-law-normal",
        }
    }
}

/// 20·log₁₀(f·m_s) − 48 dB. Negative results are returned unchanged.
pub fn mass_law_stl(frequency_hz: f64, surface_density: f64) -> Result<f64> {
    mass_law(
        frequency_hz,
        surface_density,
        MassLawConstant::Paper,
        &AirProperties::default(),
    )
}

pub fn mass_law(
    frequency_hz: f64,
    surface_density: f64,
    constant: MassLawConstant,
    air: &AirProperties,
) -> Result<f64> {
    if !(frequency_hz > 0.0 && surface_density > 0.0) {
        return Err(Error::domain(format!(
            "mass law needs positive f and m_s, got {frequency_hz} Hz and {surface_density} kg/m²"
        )));
    }
    Ok(20.0 * (frequency_hz * surface_density).log10() + constant.offset_db(air))
}

/// Impervious limp sheet: [[1, jωm_s], [0, 1]].
pub fn limp_mass_matrix(frequency_hz: f64, surface_density: f64) -> Result<TransferMatrix> {
    if !(frequency_hz > 0.0) || !(surface_density >= 0.0) {
        return Err(Error::domain(format!(
            "limp mass needs f > 0 and m_s ≥ 0, got {frequency_hz} Hz and {surface_density} kg/m²"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(TransferMatrix::new(
        one,
        J * 2.0 * PI * frequency_hz * surface_density,
        zero,
        one,
    ))
}

/// Lossless air layer of length `length` metres.
pub fn air_gap_matrix(frequency_hz: f64, length: f64, air: &AirProperties) -> Result<TransferMatrix> {
    if !(length >= 0.0) {
        return Err(Error::domain(format!("air gap length must be ≥ 0, got {length}")));
    }
    let z = air.characteristic_impedance();
    let kl = 2.0 * PI * frequency_hz / air.sound_speed() * length;
    let (s, c) = kl.sin_cos();
    Ok(TransferMatrix::new(
        Complex64::new(c, 0.0),
        J * z * s,
        J * s / z,
        Complex64::new(c, 0.0),
    ))
}

/// One layer of a stack.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerModel {
    LimpMass {
        surface_density: f64,
    },
    AirGap {
        thickness: f64,
    },
    Identity,
    /// Frequency-independent matrix supplied by the user.
    Explicit {
        matrix: TransferMatrix,
        passive_symmetric: bool,
    },
}

impl LayerModel {
    pub fn limp(surface_density: f64) -> Result<Self> {
        if !(surface_density > 0.0) {
            return Err(Error::domain(format!("limp mass needs m_s > 0, got {surface_density}")));
        }
        Ok(LayerModel::LimpMass { surface_density })
    }

    pub fn air_gap(thickness: f64) -> Result<Self> {
        if !(thickness >= 0.0) {
            return Err(Error::domain(format!("air gap needs thickness ≥ 0, got {thickness}")));
        }
        Ok(LayerModel::AirGap { thickness })
    }

    pub fn explicit(matrix: TransferMatrix, passive_symmetric: bool) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::domain("explicit matrix has non-finite entries"));
        }
        if passive_symmetric && (matrix.determinant() - 1.0).norm() > 1e-9 {
            return Err(Error::domain(format!(
                "matrix flagged passive-symmetric has det = {}",
                matrix.determinant()
            )));
        }
        Ok(LayerModel::Explicit {
            matrix,
            passive_symmetric,
        })
    }

    /// Physical extent along the tube; sheets are treated as infinitely thin.
    pub fn thickness(&self) -> f64 {
        match self {
            LayerModel::AirGap { thickness } => *thickness,
            _ => 0.0,
        }
    }

    pub fn matrix(&self, frequency_hz: f64, air: &AirProperties) -> Result<TransferMatrix> {
        match self {
            LayerModel::LimpMass { surface_density } => limp_mass_matrix(frequency_hz, *surface_density),
            LayerModel::AirGap { thickness } => air_gap_matrix(frequency_hz, *thickness, air),
            LayerModel::Identity => Ok(TransferMatrix::identity()),
            LayerModel::Explicit { matrix, .. } => Ok(*matrix),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LayerModel::LimpMass { surface_density } => format!("limp {surface_density} kg/m²"),
            LayerModel::AirGap { thickness } => format!("air {} mm", thickness * 1e3),
            LayerModel::Identity => "identity".to_string(),
            LayerModel::Explicit { .. } => "matrix".to_string(),
        }
    }
}

/// Product of the layer matrices, incident side first, at every grid frequency.
pub fn cascade(layers: &[LayerModel], grid: &FrequencyGrid, air: &AirProperties) -> Result<Vec<TransferMatrix>> {
    if layers.is_empty() {
        return Err(Error::domain("cannot cascade an empty layer list"));
    }
    grid.iter()
        .map(|f| {
            layers
                .iter()
                .try_fold(TransferMatrix::identity(), |acc, l| Ok(acc * l.matrix(f, air)?))
        })
        .collect()
}

pub fn stack_thickness(layers: &[LayerModel]) -> f64 {
    layers.iter().map(LayerModel::thickness).sum()
}

/// Normal-incidence STL of a stack at every grid frequency (+∞ where the
/// transmission vanishes).
pub fn cascade_stl(layers: &[LayerModel], grid: &FrequencyGrid, air: &AirProperties) -> Result<Vec<Option<f64>>> {
    let matrices = cascade(layers, grid, air)?;
    let d = stack_thickness(layers);
    Ok(grid
        .wavenumbers(air)
        .into_iter()
        .zip(matrices)
        .map(|(k, m)| transmission_coefficient(&m, k, d, air).map(stl))
        .collect())
}

/// Closed-form normal-incidence STL of a limp sheet, 10·log₁₀(1 + (ωm/2ρ₀c)²).
pub fn limp_mass_stl(frequency_hz: f64, surface_density: f64, air: &AirProperties) -> f64 {
    let x = 2.0 * PI * frequency_hz * surface_density / (2.0 * air.characteristic_impedance());
    10.0 * (1.0 + x * x).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::curtain_materials;
    use crate::transfer::reflection_coefficient_anechoic;
    use proptest::prelude::*;

    fn air() -> AirProperties {
        AirProperties::default()
    }

    #[test]
    fn mass_law_examples() {
        let pvc = mass_law_stl(1000.0, 1.216).unwrap();
        assert!((pvc - 13.69867149873432).abs() < 1e-9);
        assert!((pvc - 13.70).abs() < 0.01);
        let pe = mass_law_stl(1000.0, 1.135).unwrap();
        assert!((pe - 13.099917230582832).abs() < 1e-9);
        let felt = mass_law_stl(1000.0, 0.213).unwrap();
        assert!((felt + 1.4324079312252493).abs() < 1e-9);
        assert!(mass_law_stl(0.0, 1.0).is_err());
        assert!(mass_law_stl(100.0, -1.0).is_err());
    }

    #[test]
    fn normal_constant_matches_limp_asymptote() {
        let a = air();
        assert!((MassLawConstant::Normal.offset_db(&a) + 42.38047786808679).abs() < 1e-9);
        // far above the mass-controlled knee the exact limp STL approaches the normal mass law
        let exact = limp_mass_stl(20_000.0, 5.0, &a);
        let asym = mass_law(20_000.0, 5.0, MassLawConstant::Normal, &a).unwrap();
        assert!((exact - asym).abs() < 1e-4);
    }

    #[test]
    fn constants_differ_by_fixed_offset() {
        let a = air();
        let delta = MassLawConstant::Normal.offset_db(&a) - MassLawConstant::Paper.offset_db(&a);
        for f in [100.0, 315.0, 1000.0, 4000.0] {
            let p = mass_law(f, 0.644, MassLawConstant::Paper, &a).unwrap();
            let n = mass_law(f, 0.644, MassLawConstant::Normal, &a).unwrap();
            assert!((n - p - delta).abs() < 1e-12);
        }
    }

    #[test]
    fn limp_matrix_examples() {
        let m = limp_mass_matrix(1000.0, 0.0).unwrap();
        assert_eq!(m, TransferMatrix::identity());
        let m = limp_mass_matrix(1000.0, 1.135).unwrap();
        assert_eq!(m.determinant(), Complex64::new(1.0, 0.0));
        let k = 2.0 * PI * 1000.0 / air().sound_speed();
        let ta = transmission_coefficient(&m, k, 0.0, &air()).unwrap();
        assert!((stl(ta) - 18.77737428212981).abs() < 1e-9);
        assert!((stl(ta) - limp_mass_stl(1000.0, 1.135, &air())).abs() < 1e-9);
    }

    #[test]
    fn air_gap_examples() {
        let a = air();
        assert!(
            air_gap_matrix(500.0, 0.0, &a)
                .unwrap()
                .max_abs_diff(&TransferMatrix::identity())
                < 1e-15
        );
        let f = 1000.0;
        let k = 2.0 * PI * f / a.sound_speed();
        let half = PI / k;
        let m = air_gap_matrix(f, half, &a).unwrap();
        let minus = TransferMatrix::new(
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        );
        assert!(m.t11.re + 1.0 < 1e-12 && m.t22.re + 1.0 < 1e-12);
        assert!(m.t12.norm() < 1e-9 && m.t21.norm() < 1e-15);
        assert!(m.max_abs_diff(&minus) < 1e-9);
        let ta = transmission_coefficient(&m, k, half, &a).unwrap();
        assert!((ta.norm() - 1.0).abs() < 1e-12);
        assert!(air_gap_matrix(100.0, -0.1, &a).is_err());
    }

    #[test]
    fn cascade_examples() {
        let a = air();
        let grid = FrequencyGrid::linear(100.0, 2000.0, 100.0).unwrap();
        let ident = cascade(&[LayerModel::Identity, LayerModel::Identity], &grid, &a).unwrap();
        assert!(ident.iter().all(|m| *m == TransferMatrix::identity()));
        assert!(cascade(&[], &grid, &a).is_err());

        let two = cascade_stl(
            &[LayerModel::limp(0.224).unwrap(), LayerModel::limp(1.216).unwrap()],
            &grid,
            &a,
        )
        .unwrap();
        let sum = cascade_stl(&[LayerModel::limp(0.224 + 1.216).unwrap()], &grid, &a).unwrap();
        for (x, y) in two.iter().zip(&sum) {
            assert!((x.unwrap() - y.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn sandwich_beats_light_sheet_at_1000_hz() {
        let a = air();
        let grid = FrequencyGrid::new(vec![1000.0]).unwrap();
        let stack = [
            LayerModel::limp(0.224).unwrap(),
            LayerModel::air_gap(0.005).unwrap(),
            LayerModel::limp(1.216).unwrap(),
        ];
        let s = cascade_stl(&stack, &grid, &a).unwrap()[0].unwrap();
        let single = cascade_stl(&[LayerModel::limp(0.224).unwrap()], &grid, &a).unwrap()[0].unwrap();
        assert!(s > single);
        // at 1 kHz the 5 mm gap is acoustically small, so the pair sits near the summed-mass bound
        let summed = mass_law_stl(1000.0, 0.224 + 1.216).unwrap();
        assert!(s > summed - 6.0);
    }

    #[test]
    fn explicit_layer_validation() {
        let bad = TransferMatrix::new(
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
        );
        assert!(LayerModel::explicit(bad, true).is_err());
        assert!(LayerModel::explicit(bad, false).is_ok());
        assert!(LayerModel::limp(0.0).is_err());
        assert!(LayerModel::air_gap(-1.0).is_err());
    }

    #[test]
    fn limp_normal_incidence_exceeds_field_mass_law() {
        let a = air();
        for mat in curtain_materials() {
            for f in [100.0, 250.0, 630.0, 1000.0, 1600.0, 5000.0] {
                let field = mass_law_stl(f, mat.surface_density()).unwrap();
                let normal = limp_mass_stl(f, mat.surface_density(), &a);
                if field > 0.0 && normal > 0.0 {
                    assert!(normal > field, "{} at {f}: {normal} ≤ {field}", mat.name());
                }
            }
        }
    }

    fn layer() -> impl Strategy<Value = LayerModel> {
        prop_oneof![
            (0.01f64..3.0).prop_map(|m| LayerModel::LimpMass { surface_density: m }),
            (0.0f64..0.2).prop_map(|t| LayerModel::AirGap { thickness: t }),
            Just(LayerModel::Identity),
        ]
    }

    proptest! {
        #[test]
        fn mass_law_slope_is_6_db_per_doubling(f in 10.0f64..10_000.0, m in 0.01f64..10.0) {
            let base = mass_law_stl(f, m).unwrap();
            let df = mass_law_stl(2.0 * f, m).unwrap();
            let dm = mass_law_stl(f, 2.0 * m).unwrap();
            prop_assert!((df - base - 6.020599913279624).abs() < 1e-9);
            prop_assert!((dm - base - 6.020599913279624).abs() < 1e-9);
        }

        #[test]
        fn cascade_is_associative(a in layer(), b in layer(), c in layer(), f in 50.0f64..5000.0) {
            let air = AirProperties::default();
            let grid = FrequencyGrid::new(vec![f]).unwrap();
            let ma = cascade(&[a], &grid, &air).unwrap()[0];
            let mb = cascade(&[b], &grid, &air).unwrap()[0];
            let mc = cascade(&[c], &grid, &air).unwrap()[0];
            let left = ma * (mb * mc);
            let right = (ma * mb) * mc;
            let scale = 1.0 + left.t12.norm().max(right.t12.norm());
            prop_assert!(left.max_abs_diff(&right) <= 1e-12 * scale);
        }

        #[test]
        fn lossless_cascades_conserve_energy(layers in proptest::collection::vec(layer(), 1..6), f in 50.0f64..5000.0) {
            let air = AirProperties::default();
            let grid = FrequencyGrid::new(vec![f]).unwrap();
            let m = cascade(&layers, &grid, &air).unwrap()[0];
            prop_assert!((m.determinant() - 1.0).norm() < 1e-9);
            let k = 2.0 * PI * f / air.sound_speed();
            let t = transmission_coefficient(&m, k, stack_thickness(&layers), &air).unwrap();
            let r = reflection_coefficient_anechoic(&m, &air).unwrap();
            prop_assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }
}
