//! envarium: exact statevector simulation of small qubit registers with an
//! engine for entanglement-assisted invariance (envariance).
//!
//! A pure bipartite state |ψ⟩ on system ⊗ environment is envariant under a
//! system-local unitary u_S when some environment-local unitary u_E restores
//! the joint state: (I ⊗ u_E)(u_S ⊗ I)|ψ⟩ = |ψ⟩ up to a global phase. The
//! crate decides that question constructively, builds the assisting u_E, and
//! ships a small line-oriented circuit language, seeded shot sampling, a
//! Pauli-trajectory noise model, and six built-in demonstration experiments
//! on 2 to 5 qubits.

pub mod bipartite;
pub mod builtins;
pub mod circuit;
pub mod envariance;
pub mod error;
pub mod gate;
pub mod matrix;
pub mod noise;
pub mod sampling;
pub mod state;
pub mod testing;

pub use bipartite::{Bipartition, DensityMatrix, SchmidtDecomposition};
pub use circuit::{Circuit, CircuitOp};
pub use envariance::EnvarianceReport;
pub use error::{Error, Result};
pub use gate::GateMatrix;
pub use matrix::CMatrix;
pub use noise::NoiseParams;
pub use sampling::{Distribution, OutcomeHistogram};
pub use state::StateVector;
