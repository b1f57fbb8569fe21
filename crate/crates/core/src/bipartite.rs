//! System/environment bipartitions, reduced density matrices and Schmidt
//! decompositions of pure states.

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::state::StateVector;

/// Schmidt coefficients below this are reported as exactly zero.
pub const SCHMIDT_FLOOR: f64 = 1e-12;

/// Assignment of every register qubit to either the system S or the
/// environment E. The *order* in which qubits are listed fixes the axis
/// ordering of the reshaped state: the first listed qubit of each side is
/// the most significant bit of that side's index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    s_qubits: Vec<usize>,
    e_qubits: Vec<usize>,
}

impl Bipartition {
    /// Both lists non-empty, disjoint, and together exactly {0..n-1}.
    pub fn new(s_qubits: Vec<usize>, e_qubits: Vec<usize>) -> Result<Self> {
        if s_qubits.is_empty() || e_qubits.is_empty() {
            return Err(Error::InvalidPartition(
                "both partitions must be non-empty".into(),
            ));
        }
        let n = s_qubits.len() + e_qubits.len();
        let mut seen = vec![false; n];
        for &q in s_qubits.iter().chain(&e_qubits) {
            if q >= n {
                return Err(Error::InvalidPartition(format!(
                    "qubit {q} out of range for {n} qubits"
                )));
            }
            if seen[q] {
                return Err(Error::InvalidPartition(format!("qubit {q} listed twice")));
            }
            seen[q] = true;
        }
        Ok(Bipartition { s_qubits, e_qubits })
    }

    pub fn s_qubits(&self) -> &[usize] {
        &self.s_qubits
    }

    pub fn e_qubits(&self) -> &[usize] {
        &self.e_qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.s_qubits.len() + self.e_qubits.len()
    }

    pub fn dim_s(&self) -> usize {
        1 << self.s_qubits.len()
    }

    pub fn dim_e(&self) -> usize {
        1 << self.e_qubits.len()
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} qubits but the state has {}",
                self.num_qubits(),
                state.num_qubits()
            )));
        }
        Ok(())
    }
}

/// Reduced density matrix on the system side. Hermitian, unit trace,
/// positive semidefinite.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants (Hermitian and unit trace
    /// within 1e-10, eigenvalues >= -1e-10).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_hermitian(1e-10) {
            return Err(Error::BadDensityMatrix(format!(
                "not Hermitian, deviation {:.3e}",
                matrix.hermiticity_deviation()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::BadDensityMatrix(format!("trace {tr} is not 1")));
        }
        if let Some(&lambda_min) = matrix
            .hermitian_eigenvalues()
            .last()
            .filter(|&&l| l < -1e-10)
        {
            return Err(Error::BadDensityMatrix(format!(
                "negative eigenvalue {lambda_min:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.hermitian_eigenvalues()
    }
}

/// Schmidt form λ_k, |s_k⟩, |e_k⟩ of a pure bipartite state:
/// |ψ⟩ = Σ_k λ_k |s_k⟩ ⊗ |e_k⟩ with orthonormal bases and λ non-increasing.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    s_basis: CMatrix,
    e_basis: CMatrix,
}

impl SchmidtDecomposition {
    /// Non-increasing, non-negative; values below [`SCHMIDT_FLOOR`] are
    /// snapped to zero.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Columns are the system-side Schmidt vectors.
    pub fn s_basis(&self) -> &CMatrix {
        &self.s_basis
    }

    /// Columns are the environment-side Schmidt vectors.
    pub fn e_basis(&self) -> &CMatrix {
        &self.e_basis
    }

    /// Number of non-zero Schmidt coefficients.
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > 0.0).count()
    }

    /// Σ_k λ_k |s_k⟩⟨e_k|ᵀ as the reshaped matrix.
    pub fn reconstruct_matrix(&self) -> CMatrix {
        let dim_s = self.s_basis.rows();
        let dim_e = self.e_basis.rows();
        let mut m = CMatrix::zeros(dim_s, dim_e);
        for (k, &lambda) in self.coefficients.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for i in 0..dim_s {
                let a = self.s_basis[(i, k)] * lambda;
                for j in 0..dim_e {
                    m[(i, j)] += a * self.e_basis[(j, k)];
                }
            }
        }
        m
    }
}

/// Row/column index of one global basis state under a partition: the first
/// listed qubit is the most significant bit of the local index.
fn local_index(global: usize, qubits: &[usize]) -> usize {
    let k = qubits.len();
    let mut idx = 0usize;
    for (j, &q) in qubits.iter().enumerate() {
        if global >> q & 1 == 1 {
            idx |= 1 << (k - 1 - j);
        }
    }
    idx
}

/// Reshape a pure state into the dim_S × dim_E coefficient matrix M with
/// M[i][j] = amplitude of (S-basis i, E-basis j).
pub fn reshape_to_matrix(state: &StateVector, part: &Bipartition) -> Result<CMatrix> {
    part.check_state(state)?;
    let mut m = CMatrix::zeros(part.dim_s(), part.dim_e());
    for (global, &amp) in state.amplitudes().iter().enumerate() {
        let row = local_index(global, &part.s_qubits);
        let col = local_index(global, &part.e_qubits);
        m[(row, col)] = amp;
    }
    Ok(m)
}

/// ρ_S = M M†, tracing the environment out of |ψ⟩⟨ψ|.
pub fn partial_trace_over_e(state: &StateVector, part: &Bipartition) -> Result<DensityMatrix> {
    let m = reshape_to_matrix(state, part)?;
    DensityMatrix::new(m.matmul(&m.dagger())?)
}

/// Schmidt decomposition via SVD of the reshaped state.
pub fn schmidt_decompose(state: &StateVector, part: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = reshape_to_matrix(state, part)?;
    let svd = m.svd();
    let k = part.dim_s().min(part.dim_e());
    let coefficients = svd
        .singular_values
        .iter()
        .take(k)
        .map(|&s| if s < SCHMIDT_FLOOR { 0.0 } else { s })
        .collect();

    let mut s_basis = CMatrix::zeros(part.dim_s(), k);
    let mut e_basis = CMatrix::zeros(part.dim_e(), k);
    for c in 0..k {
        for r in 0..part.dim_s() {
            s_basis[(r, c)] = svd.u[(r, c)];
        }
        for r in 0..part.dim_e() {
            // M = U Σ V†, so |ψ⟩ = Σ_k σ_k |u_k⟩ ⊗ |conj(v_k)⟩
            e_basis[(r, c)] = svd.v[(r, c)].conj();
        }
    }
    Ok(SchmidtDecomposition {
        coefficients,
        s_basis,
        e_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateMatrix;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> StateVector {
        StateVector::ground(2)
            .unwrap()
            .apply_single_qubit_gate(&GateMatrix::h(), 1)
            .unwrap()
            .apply_cnot(1, 0)
            .unwrap()
    }

    fn ghz(n: usize) -> StateVector {
        let mut s = StateVector::ground(n)
            .unwrap()
            .apply_single_qubit_gate(&GateMatrix::h(), n - 1)
            .unwrap();
        for t in (0..n - 1).rev() {
            s = s.apply_cnot(n - 1, t).unwrap();
        }
        s
    }

    #[test]
    fn partition_validation() {
        assert!(Bipartition::new(vec![1], vec![0]).is_ok());
        assert!(Bipartition::new(vec![], vec![0]).is_err());
        assert!(Bipartition::new(vec![0], vec![0]).is_err());
        assert!(Bipartition::new(vec![2], vec![0]).is_err()); // gap: qubit 1 missing
        let p = Bipartition::new(vec![1], vec![0]).unwrap();
        assert!(reshape_to_matrix(&StateVector::ground(3).unwrap(), &p).is_err());
    }

    #[test]
    fn bell_reshape_is_scaled_identity() {
        let p = Bipartition::new(vec![1], vec![0]).unwrap();
        let m = reshape_to_matrix(&bell(), &p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { FRAC_1_SQRT_2 } else { 0.0 };
                assert!((m[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_reshape_is_rank_one() {
        let p = Bipartition::new(vec![1], vec![0]).unwrap();
        let m = reshape_to_matrix(&StateVector::ground(2).unwrap(), &p).unwrap();
        assert_eq!(m[(0, 0)], Complex64::ONE);
        assert!((m.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_partial_trace_is_maximally_mixed() {
        let p = Bipartition::new(vec![1], vec![0]).unwrap();
        let rho = partial_trace_over_e(&bell(), &p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((rho.matrix()[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_partial_trace_is_pure_projector() {
        let p = Bipartition::new(vec![1], vec![0]).unwrap();
        let rho = partial_trace_over_e(&StateVector::ground(2).unwrap(), &p).unwrap();
        assert!((rho.matrix()[(0, 0)] - Complex64::ONE).norm() < 1e-12);
        assert!((rho.matrix().frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_partial_trace_on_two_qubits() {
        let p = Bipartition::new(vec![2, 1], vec![0]).unwrap();
        let rho = partial_trace_over_e(&ghz(3), &p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i == 0 && j == 0) || (i == 3 && j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert!(
                    (rho.matrix()[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12,
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn schmidt_of_bell_and_product() {
        let p = Bipartition::new(vec![1], vec![0]).unwrap();

        let sd = schmidt_decompose(&bell(), &p).unwrap();
        assert_eq!(sd.rank(), 2);
        assert!((sd.coefficients()[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((sd.coefficients()[1] - FRAC_1_SQRT_2).abs() < 1e-12);

        let sd = schmidt_decompose(&StateVector::ground(2).unwrap(), &p).unwrap();
        assert_eq!(sd.rank(), 1);
        assert!((sd.coefficients()[0] - 1.0).abs() < 1e-12);
        assert_eq!(sd.coefficients()[1], 0.0);
    }

    #[test]
    fn schmidt_of_five_qubit_ghz() {
        let p = Bipartition::new(vec![4, 3, 2], vec![1, 0]).unwrap();
        let sd = schmidt_decompose(&ghz(5), &p).unwrap();
        assert_eq!(sd.coefficients().len(), 4);
        assert!((sd.coefficients()[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((sd.coefficients()[1] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(sd.coefficients()[2], 0.0);
        assert_eq!(sd.coefficients()[3], 0.0);
        assert_eq!(sd.rank(), 2);
    }

    #[test]
    fn schmidt_reconstruction_matches_reshape() {
        let p = Bipartition::new(vec![2, 0], vec![1]).unwrap();
        let s = ghz(3)
            .apply_single_qubit_gate(&GateMatrix::t(), 0)
            .unwrap()
            .apply_single_qubit_gate(&GateMatrix::h(), 2)
            .unwrap();
        let m = reshape_to_matrix(&s, &p).unwrap();
        let sd = schmidt_decompose(&s, &p).unwrap();
        let rec = sd.reconstruct_matrix();
        // compare up to nothing: reconstruction is exact, not just up to phase
        assert!(rec.sub(&m).unwrap().frobenius_norm() < 1e-8);
        let sum_sq: f64 = sd.coefficients().iter().map(|c| c * c).sum();
        assert!((sum_sq - 1.0).abs() < 1e-10);
    }
}
