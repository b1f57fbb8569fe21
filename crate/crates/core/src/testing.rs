//! Test-support generators and independent oracles.
//!
//! Nothing here is used by the simulation paths; the functions exist so that
//! unit, property and acceptance tests can check the engine against
//! independently constructed expectations (dense Kronecker application,
//! exhaustive index arithmetic, brute-force minimization over parametrized
//! unitaries).

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bipartite::Bipartition;
use crate::envariance::verify_pair;
use crate::gate::GateMatrix;
use crate::matrix::CMatrix;
use crate::state::StateVector;

/// Standard normal via Box-Muller from two uniform draws.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-ish random unitary: complex Gaussian matrix, Gram-Schmidt columns.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> GateMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut col: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                .collect();
            for prev in &cols {
                let proj: Complex64 = prev.iter().zip(&col).map(|(p, c)| p.conj() * c).sum();
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= proj * p;
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                cols.clear();
                break; // degenerate draw, start over
            }
            for z in &mut col {
                *z /= norm;
            }
            cols.push(col);
        }
        if cols.len() < dim {
            continue;
        }
        let mut m = CMatrix::zeros(dim, dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        if let Ok(g) = GateMatrix::from_matrix(m) {
            return g;
        }
    }
}

/// Normalized random state with complex Gaussian amplitudes.
pub fn random_state(rng: &mut ChaCha8Rng, num_qubits: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << num_qubits)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    StateVector::from_amplitudes_normalized(amps).expect("gaussian draw is non-zero")
}

/// Two-qubit state with both Schmidt coefficients equal to 1/√2 and random
/// orthonormal bases on each side (qubit 1 = S, qubit 0 = E). Assembled
/// directly from the bases, independent of any SVD code.
pub fn random_equal_schmidt_state(rng: &mut ChaCha8Rng) -> StateVector {
    build_from_schmidt(rng, std::f64::consts::FRAC_1_SQRT_2)
}

/// Two-qubit state with clearly distinct Schmidt coefficients plus a u_S
/// that is diagonal in the state's S-side Schmidt basis, hence envariant by
/// construction.
pub fn random_distinct_schmidt_pair(rng: &mut ChaCha8Rng) -> (StateVector, GateMatrix) {
    // λ0 = cos α, λ1 = sin α with α well inside (0, π/4)
    let alpha = 0.15 + 0.5 * rng.random::<f64>();
    let (lambda0, lambda1) = (alpha.cos(), alpha.sin());
    let a = random_unitary(rng, 2);
    let b = random_unitary(rng, 2);
    let state = assemble_two_qubit(&a, &b, lambda0, lambda1);

    let phase0 = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
    let phase1 = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
    // u_S = A diag(e^{iθ0}, e^{iθ1}) A†
    let mut diag = CMatrix::zeros(2, 2);
    diag[(0, 0)] = phase0;
    diag[(1, 1)] = phase1;
    let u = a
        .matrix()
        .matmul(&diag)
        .and_then(|t| t.matmul(&a.matrix().dagger()))
        .expect("2x2");
    (
        state,
        GateMatrix::from_matrix(u).expect("unitary by construction"),
    )
}

fn build_from_schmidt(rng: &mut ChaCha8Rng, lambda: f64) -> StateVector {
    let a = random_unitary(rng, 2);
    let b = random_unitary(rng, 2);
    assemble_two_qubit(&a, &b, lambda, (1.0 - lambda * lambda).sqrt())
}

fn assemble_two_qubit(a: &GateMatrix, b: &GateMatrix, lambda0: f64, lambda1: f64) -> StateVector {
    let mut amps = vec![Complex64::ZERO; 4];
    for s_bit in 0..2 {
        for e_bit in 0..2 {
            // qubit 1 = S, qubit 0 = E
            let global = (s_bit << 1) | e_bit;
            amps[global] = lambda0 * a.matrix()[(s_bit, 0)] * b.matrix()[(e_bit, 0)]
                + lambda1 * a.matrix()[(s_bit, 1)] * b.matrix()[(e_bit, 1)];
        }
    }
    StateVector::from_amplitudes_normalized(amps).expect("unit Schmidt vector")
}

/// SU(2) element from three angles; covers all of U(2) up to global phase.
pub fn su2(theta: f64, phi: f64, lam: f64) -> GateMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::from_polar(c, phi);
    m[(0, 1)] = Complex64::from_polar(s, lam);
    m[(1, 0)] = -Complex64::from_polar(s, -lam);
    m[(1, 1)] = Complex64::from_polar(c, -phi);
    GateMatrix::from_matrix(m).expect("su2 is unitary")
}

/// Brute-force minimization of [`verify_pair`] over all 2×2 unitaries u_E:
/// a coarse grid over the SU(2) angles followed by shrinking local
/// refinement. Returns the best residual and its minimizer.
pub fn minimize_verify_pair(
    state: &StateVector,
    u_s: &GateMatrix,
    part: &Bipartition,
) -> (f64, GateMatrix) {
    use std::f64::consts::{FRAC_PI_2, TAU};

    let eval = |theta: f64, phi: f64, lam: f64| -> f64 {
        verify_pair(state, u_s, &su2(theta, phi, lam), part).expect("dimensions fixed")
    };

    // Coarse scan, keeping a handful of the best cells as starts.
    let mut grid: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(12 * 16 * 16);
    for it in 0..12 {
        let theta = FRAC_PI_2 * (it as f64 + 0.5) / 12.0;
        for ip in 0..16 {
            let phi = TAU * ip as f64 / 16.0;
            for il in 0..16 {
                let lam = TAU * il as f64 / 16.0;
                grid.push((eval(theta, phi, lam), theta, phi, lam));
            }
        }
    }
    grid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Pattern search from each start: move while a neighbor improves, only
    // shrink the step when stuck. Shrinking on every round regardless can
    // strand the search partway down a curved valley.
    let mut best = grid[0];
    for &start in grid.iter().take(3) {
        let mut current = start;
        let mut step = FRAC_PI_2 / 12.0;
        for _ in 0..400 {
            let (_, t0, p0, l0) = current;
            let mut improved = false;
            for dt in [-1.0, 0.0, 1.0] {
                for dp in [-1.0, 0.0, 1.0] {
                    for dl in [-1.0, 0.0, 1.0] {
                        if dt == 0.0 && dp == 0.0 && dl == 0.0 {
                            continue;
                        }
                        let (t, p, l) = (t0 + dt * step, p0 + dp * step, l0 + dl * step);
                        let r = eval(t, p, l);
                        if r < current.0 {
                            current = (r, t, p, l);
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            if step < 1e-10 || current.0 < 1e-9 {
                break;
            }
        }
        if current.0 < best.0 {
            best = current;
        }
        if best.0 < 1e-9 {
            break; // already at the global floor
        }
    }

    let (residual, t, p, l) = best;
    (residual, su2(t, p, l))
}

/// Apply a k-qubit gate by explicitly assembling the full 2^n × 2^n matrix
/// with index arithmetic and multiplying. Slow and independent of the axis
/// contraction in `StateVector::apply_unitary_on_subset`.
pub fn kron_oracle_apply(state: &StateVector, gate: &GateMatrix, targets: &[usize]) -> StateVector {
    let n = state.num_qubits();
    let dim = 1usize << n;
    let k = targets.len();
    assert_eq!(gate.dimension(), 1 << k);

    let local = |global: usize| -> usize {
        let mut idx = 0;
        for (j, &t) in targets.iter().enumerate() {
            if global >> t & 1 == 1 {
                idx |= 1 << (k - 1 - j);
            }
        }
        idx
    };
    let rest_mask = {
        let mut m = usize::MAX & (dim - 1);
        for &t in targets {
            m &= !(1 << t);
        }
        m
    };

    let mut full = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & rest_mask != col & rest_mask {
                continue;
            }
            full[(row, col)] = gate.matrix()[(local(row), local(col))];
        }
    }
    let amps = full.mul_vec(state.amplitudes()).expect("square");
    StateVector::from_amplitudes(amps).expect("unitary image stays normalized")
}

/// Reshaped coefficient matrix assembled the long way: loop over the local
/// S and E indices and reassemble each global basis index bit by bit.
pub fn reshape_index_oracle(state: &StateVector, part: &Bipartition) -> CMatrix {
    let ks = part.s_qubits().len();
    let ke = part.e_qubits().len();
    let mut m = CMatrix::zeros(1 << ks, 1 << ke);
    for row in 0..1usize << ks {
        for col in 0..1usize << ke {
            let mut global = 0usize;
            for (j, &q) in part.s_qubits().iter().enumerate() {
                if row >> (ks - 1 - j) & 1 == 1 {
                    global |= 1 << q;
                }
            }
            for (j, &q) in part.e_qubits().iter().enumerate() {
                if col >> (ke - 1 - j) & 1 == 1 {
                    global |= 1 << q;
                }
            }
            m[(row, col)] = state.amplitudes()[global];
        }
    }
    m
}
