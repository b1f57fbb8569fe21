//! Deciding entanglement-assisted invariance and constructing the assisting
//! environment unitary.
//!
//! A pure state |ψ⟩ on S ⊗ E is envariant under U_S = u_S ⊗ I when some
//! U_E = I ⊗ u_E restores the joint state:
//!
//! ```text
//! (u_S ⊗ I)|ψ⟩ = |η⟩,   (I ⊗ u_E)|η⟩ = |ψ⟩   (up to a global phase)
//! ```
//!
//! Writing |ψ⟩ as the reshaped matrix M (rows = S, columns = E), the two
//! unitaries act as M ↦ u_S M and M ↦ M u_Eᵀ, so the question is whether
//! u_S M W = e^{iθ} M has a unitary solution W (then u_E = Wᵀ). It does
//! exactly when u_S preserves the reduced state ρ_S = M M†, and the solution
//! on the support of ρ_E is W = M⁺ u_S† M, completed by the identity on the
//! orthogonal complement. The engine tests the preservation condition, runs
//! that construction, and then verifies the restored state end to end — a
//! report claims envariance only when both checks pass.

use crate::bipartite::{reshape_to_matrix, Bipartition};
use crate::error::{Error, Result};
use crate::gate::GateMatrix;
use crate::matrix::CMatrix;
use crate::state::StateVector;

/// Default decision tolerance for both residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Relative singular-value cutoff for the pseudo-inverse and support rank.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Outcome of an envariance check.
#[derive(Clone, Debug)]
pub struct EnvarianceReport {
    /// True when both the reduced-state condition and the constructive
    /// verification pass at `tolerance_used`.
    pub envariant: bool,
    /// The assisting u_E; present only when `envariant`.
    pub assisting_unitary: Option<GateMatrix>,
    /// |η⟩ = (u_S ⊗ I)|ψ⟩.
    pub intermediate_state: StateVector,
    /// ‖u_S ρ_S u_S† − ρ_S‖_F.
    pub residual_condition: f64,
    /// Phase-insensitive distance of the restored state from |ψ⟩ using the
    /// constructed u_E (best effort even when not envariant).
    pub residual_restore: f64,
    pub tolerance_used: f64,
}

fn check_dims(state: &StateVector, u_s: &GateMatrix, part: &Bipartition) -> Result<()> {
    if part.num_qubits() != state.num_qubits() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} qubits but the state has {}",
            part.num_qubits(),
            state.num_qubits()
        )));
    }
    if u_s.dimension() != part.dim_s() {
        return Err(Error::DimensionMismatch {
            expected: part.dim_s(),
            actual: u_s.dimension(),
        });
    }
    Ok(())
}

/// ‖u_S ρ_S u_S† − ρ_S‖_F for ρ_S = M M†.
fn condition_residual(m: &CMatrix, u_s: &GateMatrix) -> f64 {
    let rho = m.matmul(&m.dagger()).expect("shapes by construction");
    let rotated = u_s
        .matrix()
        .matmul(&rho)
        .and_then(|t| t.matmul(&u_s.matrix().dagger()))
        .expect("square");
    rotated.sub(&rho).expect("same shape").frobenius_norm()
}

/// Best-effort assisting unitary: W = M⁺ u_S† M on supp(ρ_E), identity on
/// the complement, projected to the nearest unitary. u_E = Wᵀ.
fn build_assisting(m: &CMatrix, u_s: &GateMatrix) -> GateMatrix {
    let dim_e = m.cols();
    let svd = m.svd();
    let rank = svd.rank(SUPPORT_CUTOFF);

    let w_support = m
        .pinv(SUPPORT_CUTOFF)
        .matmul(&u_s.matrix().dagger())
        .and_then(|t| t.matmul(m))
        .expect("shapes by construction");

    // P_E = V_r V_r†, projector onto the support of ρ_E.
    let mut projector = CMatrix::zeros(dim_e, dim_e);
    for k in 0..rank {
        for i in 0..dim_e {
            for j in 0..dim_e {
                projector[(i, j)] += svd.v[(i, k)] * svd.v[(j, k)].conj();
            }
        }
    }
    let w_raw = w_support
        .add(&CMatrix::identity(dim_e))
        .and_then(|t| t.sub(&projector))
        .expect("square");

    // Snap to the nearest unitary (polar factor). When the preservation
    // condition holds exactly this is already unitary and the projection is
    // the identity map.
    let polar = w_raw.svd();
    let w = polar.u.matmul(&polar.v.dagger()).expect("square");
    GateMatrix::from_matrix(w.transpose()).expect("polar factor is unitary")
}

/// Residual of a candidate pair: the phase-insensitive distance
/// between (I ⊗ u_E)(u_S ⊗ I)|ψ⟩ and |ψ⟩.
pub fn verify_pair(
    state: &StateVector,
    u_s: &GateMatrix,
    u_e: &GateMatrix,
    part: &Bipartition,
) -> Result<f64> {
    check_dims(state, u_s, part)?;
    if u_e.dimension() != part.dim_e() {
        return Err(Error::DimensionMismatch {
            expected: part.dim_e(),
            actual: u_e.dimension(),
        });
    }
    let restored = state
        .apply_unitary_on_subset(u_s, part.s_qubits())?
        .apply_unitary_on_subset(u_e, part.e_qubits())?;
    restored.global_phase_distance(state)
}

/// Decide envariance of `state` under `u_s ⊗ I` at tolerance `tol`.
pub fn check_envariance(
    state: &StateVector,
    u_s: &GateMatrix,
    part: &Bipartition,
    tol: f64,
) -> Result<EnvarianceReport> {
    check_dims(state, u_s, part)?;
    let m = reshape_to_matrix(state, part)?;
    let residual_condition = condition_residual(&m, u_s);

    let candidate = build_assisting(&m, u_s);
    let intermediate_state = state.apply_unitary_on_subset(u_s, part.s_qubits())?;
    let residual_restore = intermediate_state
        .apply_unitary_on_subset(&candidate, part.e_qubits())?
        .global_phase_distance(state)?;

    let envariant = residual_condition <= tol && residual_restore <= tol;
    Ok(EnvarianceReport {
        envariant,
        assisting_unitary: envariant.then_some(candidate),
        intermediate_state,
        residual_condition,
        residual_restore,
        tolerance_used: tol,
    })
}

/// Construct the assisting u_E, failing when the reduced-state condition is
/// violated at [`DEFAULT_TOLERANCE`].
pub fn construct_assisting_unitary(
    state: &StateVector,
    u_s: &GateMatrix,
    part: &Bipartition,
) -> Result<GateMatrix> {
    check_dims(state, u_s, part)?;
    let m = reshape_to_matrix(state, part)?;
    let residual = condition_residual(&m, u_s);
    if residual > DEFAULT_TOLERANCE {
        return Err(Error::NotEnvariant { residual });
    }
    Ok(build_assisting(&m, u_s))
}
