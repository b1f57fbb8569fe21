//! The six built-in demonstration experiments.
//!
//! Each experiment prepares a state, applies a system-side unitary u_S, and
//! applies the environment-side map that undoes it (except `figc1`, which
//! deliberately starts from the wrong state so the pair fails to return it).
//! fig1/fig4/fig5 run a Bell pair on two qubits, fig2 and fig3 run GHZ
//! states on three and five qubits under a star topology centered on
//! qubit 2, matching a device whose two-qubit gates all touch one center.

use crate::bipartite::Bipartition;
use crate::circuit::{default_display_order, Circuit, CircuitOp};
use crate::error::{Error, Result};
use crate::gate::GateMatrix;
use crate::matrix::CMatrix;
use crate::state::StateVector;

pub const EXPERIMENT_NAMES: [&str; 6] = ["fig1", "figc1", "fig2", "fig3", "fig4", "fig5"];

struct Def {
    source: &'static str,
    /// Leading ops that prepare the initial state.
    prep_ops: usize,
    s_qubits: &'static [usize],
    e_qubits: &'static [usize],
}

const FIG1: Def = Def {
    source: "\
qubits 2
# prepare (|00> + |11>)/sqrt(2): Hadamard then entangling CNOT
h 1
cx 1 0
# swap in S (qubit 1)
x 1
# counteracting swap in E (qubit 0)
x 0
measure all
",
    prep_ops: 2,
    s_qubits: &[1],
    e_qubits: &[0],
};

const FIGC1: Def = Def {
    source: "\
qubits 2
# the same swap pair as fig1, but applied to the bare ground state
x 1
x 0
measure all
",
    prep_ops: 0,
    s_qubits: &[1],
    e_qubits: &[0],
};

const FIG2: Def = Def {
    source: "\
qubits 3
topology star 2
# prepare the 3-qubit GHZ state through the center qubit
h 2
cx 2 1
cx 2 0
# swap in S (qubits 2 and 1)
x 2
x 1
# counteracting swap in E (qubit 0)
x 0
measure all
",
    prep_ops: 3,
    s_qubits: &[2, 1],
    e_qubits: &[0],
};

const FIG3: Def = Def {
    source: "\
qubits 5
topology star 2
# prepare the 5-qubit GHZ state through the center qubit
h 2
cx 2 4
cx 2 3
cx 2 1
cx 2 0
# swap in S (qubits 4, 3, 2)
x 4
x 3
x 2
# counteracting swaps in E (qubits 1, 0)
x 1
x 0
measure all
",
    prep_ops: 5,
    s_qubits: &[4, 3, 2],
    e_qubits: &[1, 0],
};

const FIG4: Def = Def {
    source: "\
qubits 2
# prepare (|00> + |11>)/sqrt(2)
h 1
cx 1 0
# create/destroy superpositions: H on S, undone by H on E
h 1
h 0
measure all
",
    prep_ops: 2,
    s_qubits: &[1],
    e_qubits: &[0],
};

const FIG5: Def = Def {
    source: "\
qubits 2
# prepare (|00> + |11>)/sqrt(2)
h 1
cx 1 0
# u_S = H*X on S: bitflip, then Hadamard
x 1
h 1
# the assisting map on E is H*X as well
x 0
h 0
measure all
",
    prep_ops: 2,
    s_qubits: &[1],
    e_qubits: &[0],
};

fn lookup(name: &str) -> Result<&'static Def> {
    match name {
        "fig1" => Ok(&FIG1),
        "figc1" => Ok(&FIGC1),
        "fig2" => Ok(&FIG2),
        "fig3" => Ok(&FIG3),
        "fig4" => Ok(&FIG4),
        "fig5" => Ok(&FIG5),
        _ => Err(Error::UnknownExperiment(name.to_string())),
    }
}

/// Canonical source text of a built-in experiment.
pub fn builtin_source(name: &str) -> Result<&'static str> {
    Ok(lookup(name)?.source)
}

/// Parse a built-in experiment into a circuit.
pub fn builtin_experiment(name: &str) -> Result<Circuit> {
    let def = lookup(name)?;
    Circuit::parse(def.source)
}

/// Everything needed to run the envariance check behind an experiment: the
/// prepared state |ψ⟩, the S/E split, and u_S.
pub struct EnvarianceConfig {
    pub prep: Circuit,
    pub bipartition: Bipartition,
    pub system_unitary: GateMatrix,
}

impl EnvarianceConfig {
    pub fn prepared_state(&self) -> Result<StateVector> {
        self.prep.execute()
    }
}

/// Derive the envariance configuration of a built-in experiment. u_S is the
/// product of the post-preparation single-qubit ops acting on S qubits,
/// embedded at their positions in the partition's qubit order.
pub fn envariance_config(name: &str) -> Result<EnvarianceConfig> {
    let def = lookup(name)?;
    let circuit = Circuit::parse(def.source)?;
    let gate_ops: Vec<CircuitOp> = circuit
        .ops()
        .iter()
        .filter(|op| !matches!(op, CircuitOp::Measure(_)))
        .copied()
        .collect();

    let prep = Circuit::from_parts(
        circuit.num_qubits(),
        gate_ops[..def.prep_ops].to_vec(),
        default_display_order(circuit.num_qubits()),
        circuit.topology(),
    );

    let k = def.s_qubits.len();
    let mut u_s = CMatrix::identity(1 << k);
    for op in &gate_ops[def.prep_ops..] {
        match op {
            CircuitOp::Gate { kind, qubit } => {
                if let Some(pos) = def.s_qubits.iter().position(|q| q == qubit) {
                    u_s = embed_single(&kind.matrix(), pos, k).matmul(&u_s)?;
                }
            }
            other => panic!("built-in post-prep ops are single-qubit, got {other:?}"),
        }
    }

    Ok(EnvarianceConfig {
        prep,
        bipartition: Bipartition::new(def.s_qubits.to_vec(), def.e_qubits.to_vec())?,
        system_unitary: GateMatrix::from_matrix(u_s)?,
    })
}

/// I ⊗ … ⊗ gate ⊗ … ⊗ I with the gate at list position `pos` of `total`
/// qubits; position 0 is the most significant factor.
fn embed_single(gate: &GateMatrix, pos: usize, total: usize) -> CMatrix {
    let left = CMatrix::identity(1 << pos);
    let right = CMatrix::identity(1 << (total - pos - 1));
    left.kron(gate.matrix()).kron(&right)
}
