//! Validated unitary gate matrices and the named single-qubit gate set.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Tolerance used when validating unitarity of gate matrices.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A dense unitary acting on k qubits (dimension 2^k). Construction always
/// validates unitarity, so holding a `GateMatrix` means holding a unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    matrix: CMatrix,
    num_qubits: usize,
}

impl GateMatrix {
    /// Validate and wrap an arbitrary matrix. Fails unless the matrix is
    /// square with power-of-two dimension >= 2, finite, and unitary within
    /// [`UNITARITY_TOL`].
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        Self::from_matrix_with_tol(matrix, UNITARITY_TOL)
    }

    /// Same as [`GateMatrix::from_matrix`] with a caller-chosen unitarity
    /// tolerance.
    pub fn from_matrix_with_tol(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let dim = matrix.rows();
        if !matrix.is_square() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::BadGateDimension(dim.max(matrix.cols())));
        }
        let dev = matrix.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(GateMatrix {
            num_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn identity(num_qubits: usize) -> Self {
        GateMatrix {
            matrix: CMatrix::identity(1 << num_qubits),
            num_qubits,
        }
    }

    fn from_rows_2x2(rows: [[Complex64; 2]; 2]) -> Self {
        let mut m = CMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = rows[i][j];
            }
        }
        GateMatrix {
            matrix: m,
            num_qubits: 1,
        }
    }

    pub fn x() -> Self {
        let o = Complex64::ONE;
        let z = Complex64::ZERO;
        Self::from_rows_2x2([[z, o], [o, z]])
    }

    pub fn y() -> Self {
        let z = Complex64::ZERO;
        Self::from_rows_2x2([[z, -Complex64::I], [Complex64::I, z]])
    }

    pub fn z() -> Self {
        let o = Complex64::ONE;
        let zr = Complex64::ZERO;
        Self::from_rows_2x2([[o, zr], [zr, -o]])
    }

    pub fn h() -> Self {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::from_rows_2x2([[c, c], [c, -c]])
    }

    pub fn s() -> Self {
        let o = Complex64::ONE;
        let z = Complex64::ZERO;
        Self::from_rows_2x2([[o, z], [z, Complex64::I]])
    }

    pub fn sdg() -> Self {
        Self::s().dagger()
    }

    pub fn t() -> Self {
        let o = Complex64::ONE;
        let z = Complex64::ZERO;
        Self::from_rows_2x2([
            [o, z],
            [z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ])
    }

    pub fn tdg() -> Self {
        Self::t().dagger()
    }

    /// Look up a named single-qubit gate: i, x, y, z, h, s, sdg, t, tdg.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "i" => Some(Self::identity(1)),
            "x" => Some(Self::x()),
            "y" => Some(Self::y()),
            "z" => Some(Self::z()),
            "h" => Some(Self::h()),
            "s" => Some(Self::s()),
            "sdg" => Some(Self::sdg()),
            "t" => Some(Self::t()),
            "tdg" => Some(Self::tdg()),
            _ => None,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dimension(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dagger(&self) -> Self {
        GateMatrix {
            matrix: self.matrix.dagger(),
            num_qubits: self.num_qubits,
        }
    }

    /// Matrix product `self * other`; when applied to a state, `other` acts
    /// first. Both operands must act on the same number of qubits.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: other.dimension(),
            });
        }
        Ok(GateMatrix {
            matrix: self.matrix.matmul(&other.matrix)?,
            num_qubits: self.num_qubits,
        })
    }

    /// Kronecker product; `self` becomes the most significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        GateMatrix {
            matrix: self.matrix.kron(&other.matrix),
            num_qubits: self.num_qubits + other.num_qubits,
        }
    }

    /// Entry-wise equality up to one global phase: the smallest Frobenius
    /// distance min_θ ‖A − e^{iθ}B‖_F, evaluated in the phase-aligned form
    /// for precision near zero.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        if self.dimension() != other.dimension() {
            return f64::INFINITY;
        }
        let overlap = self
            .matrix
            .dagger()
            .matmul(&other.matrix)
            .expect("same dimension")
            .trace();
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::ONE
        };
        self.matrix
            .sub(&other.matrix.scale(phase))
            .expect("same dimension")
            .frobenius_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_are_unitary() {
        for name in ["i", "x", "y", "z", "h", "s", "sdg", "t", "tdg"] {
            let g = GateMatrix::by_name(name).unwrap();
            assert!(g.matrix().is_unitary(1e-14), "{name}");
            assert_eq!(g.num_qubits(), 1);
        }
        assert!(GateMatrix::by_name("cx").is_none());
        assert!(GateMatrix::by_name("foo").is_none());
    }

    #[test]
    fn rejects_non_unitary() {
        let mut m = CMatrix::identity(2);
        m[(0, 0)] = Complex64::new(0.5, 0.0); // the printed-prefactor trap: 1/2 instead of 1/√2
        assert!(matches!(
            GateMatrix::from_matrix(m),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn rejects_bad_dimension() {
        let m = CMatrix::identity(3);
        assert!(matches!(
            GateMatrix::from_matrix(m),
            Err(Error::BadGateDimension(3))
        ));
    }

    #[test]
    fn s_squared_is_z() {
        let s2 = GateMatrix::s().matmul(&GateMatrix::s()).unwrap();
        assert!(s2.phase_distance(&GateMatrix::z()) < 1e-14);
    }

    #[test]
    fn t_squared_is_s() {
        let t2 = GateMatrix::t().matmul(&GateMatrix::t()).unwrap();
        assert!(t2.phase_distance(&GateMatrix::s()) < 1e-14);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let x = GateMatrix::x();
        let phased =
            GateMatrix::from_matrix(x.matrix().scale(Complex64::from_polar(1.0, 1.234))).unwrap();
        assert!(x.phase_distance(&phased) < 1e-12);
        assert!(x.phase_distance(&GateMatrix::z()) > 1.0);
    }
}
