//! Pure statevector simulation over up to 20 qubits.
//!
//! Qubit `i` owns bit `i` of the basis-state index, so qubit 0 is the least
//! significant bit. How bitstrings are displayed is a separate concern
//! handled by the circuit layer's display order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::GateMatrix;

/// Largest supported register.
pub const MAX_QUBITS: usize = 20;

/// Tolerance for the normalization invariant.
pub const NORM_TOL: f64 = 1e-10;

/// Normalized complex amplitudes over the 2^n computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// All qubits down: |0...0⟩.
    pub fn ground(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCountOutOfRange(num_qubits));
        }
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[0] = Complex64::ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Wrap an amplitude vector; must have power-of-two length, finite
    /// entries and unit norm within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(Error::BadAmplitudeCount(len));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let state = StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        };
        let dev = (state.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(state)
    }

    /// Rescale to unit norm, then wrap. Errors on (near-)zero vectors.
    pub fn from_amplitudes_normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::NotNormalized(1.0));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Born probability of one basis state.
    pub fn probability(&self, basis_state: usize) -> f64 {
        self.amps[basis_state].norm_sqr()
    }

    fn check_target(&self, target: usize) -> Result<()> {
        if target >= self.num_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: target,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Contract a 2×2 unitary onto one qubit axis.
    pub fn apply_single_qubit_gate(&self, gate: &GateMatrix, target: usize) -> Result<Self> {
        if gate.dimension() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: gate.dimension(),
            });
        }
        self.check_target(target)?;
        let m = gate.matrix();
        let (u00, u01, u10, u11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let mut amps = self.amps.clone();
        let step = 1 << target;
        for base in (0..amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let i0 = base + offset;
                let i1 = i0 | step;
                let a = amps[i0];
                let b = amps[i1];
                amps[i0] = u00 * a + u01 * b;
                amps[i1] = u10 * a + u11 * b;
            }
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }

    /// Controlled-NOT: flip `target` where `control` is 1. A permutation of
    /// the amplitudes.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<Self> {
        self.check_target(control)?;
        self.check_target(target)?;
        if control == target {
            return Err(Error::DuplicateQubit(control));
        }
        let mut amps = self.amps.clone();
        let cbit = 1 << control;
        let tbit = 1 << target;
        for i in 0..amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                amps.swap(i, i | tbit);
            }
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }

    /// Contract a 2^k-dimensional unitary over the listed qubit axes. The
    /// first listed qubit is the most significant bit of the gate's index,
    /// matching the factor order of [`GateMatrix::kron`].
    pub fn apply_unitary_on_subset(&self, gate: &GateMatrix, targets: &[usize]) -> Result<Self> {
        let k = targets.len();
        if gate.dimension() != (1 << k) {
            return Err(Error::DimensionMismatch {
                expected: 1 << k,
                actual: gate.dimension(),
            });
        }
        for (n, &t) in targets.iter().enumerate() {
            self.check_target(t)?;
            if targets[..n].contains(&t) {
                return Err(Error::DuplicateQubit(t));
            }
        }

        // Global-index offset of each local basis state.
        let local_dim = 1 << k;
        let mut offsets = vec![0usize; local_dim];
        for (local, offset) in offsets.iter_mut().enumerate() {
            for (j, &t) in targets.iter().enumerate() {
                if local >> (k - 1 - j) & 1 == 1 {
                    *offset |= 1 << t;
                }
            }
        }
        let mask: usize = targets.iter().map(|&t| 1 << t).sum();

        let m = gate.matrix();
        let mut amps = self.amps.clone();
        let mut gathered = vec![Complex64::ZERO; local_dim];
        for base in 0..amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (g, &off) in gathered.iter_mut().zip(&offsets) {
                *g = amps[base | off];
            }
            for (row, &off) in offsets.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for (col, &g) in gathered.iter().enumerate() {
                    acc += m[(row, col)] * g;
                }
                amps[base | off] = acc;
            }
        }
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: other.dimension(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// √(2 − 2|⟨a|b⟩|): the minimum over phases θ of ‖a − e^{iθ}b‖. Zero
    /// exactly when the states agree up to a global phase.
    ///
    /// Evaluated as ‖a − e^{iθ*}b‖ with θ* the phase of ⟨a|b⟩, which keeps
    /// full precision near zero where the overlap form √(2−2|⟨a|b⟩|) cannot
    /// resolve below ~1e-8 in doubles.
    pub fn global_phase_distance(&self, other: &Self) -> Result<f64> {
        let overlap = self.inner_product(other)?;
        // e^{iθ*} = conj(⟨a|b⟩)/|⟨a|b⟩| maximizes Re(e^{iθ}⟨a|b⟩)
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::ONE
        };
        let dist_sq: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum();
        Ok(dist_sq.max(0.0).sqrt())
    }
}
