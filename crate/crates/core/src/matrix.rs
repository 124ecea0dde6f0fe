use std::ops::Mul;

use num_complex::Complex64;

/// 2×2 complex matrix mapping (pressure, particle velocity) at the
/// downstream face of a layer onto the upstream face.
///
/// ```text
/// [P]       [t11 t12] [P]
/// [V]x=0  = [t21 t22] [V]x=d
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
}

impl TransferMatrix {
    pub fn new(t11: Complex64, t12: Complex64, t21: Complex64, t22: Complex64) -> Self {
        Self { t11, t12, t21, t22 }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn determinant(&self) -> Complex64 {
        self.t11 * self.t22 - self.t12 * self.t21
    }

    /// Apply to a (pressure, velocity) pair.
    pub fn apply(&self, p: Complex64, v: Complex64) -> (Complex64, Complex64) {
        (self.t11 * p + self.t12 * v, self.t21 * p + self.t22 * v)
    }

    pub fn is_finite(&self) -> bool {
        [self.t11, self.t12, self.t21, self.t22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest element-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        [
            self.t11 - other.t11,
            self.t12 - other.t12,
            self.t21 - other.t21,
            self.t22 - other.t22,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            t11: self.t11 * rhs.t11 + self.t12 * rhs.t21,
            t12: self.t11 * rhs.t12 + self.t12 * rhs.t22,
            t21: self.t21 * rhs.t11 + self.t22 * rhs.t21,
            t22: self.t21 * rhs.t12 + self.t22 * rhs.t22,
        }
    }
}
