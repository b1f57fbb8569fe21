//! Line-oriented circuit language: parser, star-topology validation,
//! renderer and executor.
//!
//! Grammar (ASCII, case-insensitive keywords, `#` starts a comment, blank
//! lines ignored):
//!
//! ```text
//! line      := comment | directive | gateop | measureop
//! directive := 'qubits' INT | 'topology' 'star' INT | 'order' INT+
//! gateop    := ('i'|'x'|'y'|'z'|'h'|'s'|'sdg'|'t'|'tdg') INT | 'cx' INT INT
//! measureop := 'measure' (INT | 'all')
//! ```
//!
//! `qubits` must come first. With a declared star topology every `cx` must
//! touch the center qubit. Measurements are terminal markers: no gate may
//! follow one, and execution does not collapse the state — sampling happens
//! downstream.

use crate::error::{Error, Result};
use crate::gate::GateMatrix;
use crate::state::StateVector;

/// Named single-qubit gates of the circuit language.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
}

impl GateKind {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "i" => GateKind::I,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        GateMatrix::by_name(self.name()).expect("all kinds are named gates")
    }
}

/// Measurement scope of a `measure` op.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureTarget {
    Qubit(usize),
    All,
}

/// One program step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitOp {
    Gate { kind: GateKind, qubit: usize },
    Cx { control: usize, target: usize },
    Measure(MeasureTarget),
}

/// Star connectivity: every two-qubit gate must touch `center`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarTopology {
    pub center: usize,
}

/// A parsed, validated circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<CircuitOp>,
    display_order: Vec<usize>,
    topology: Option<StarTopology>,
}

/// Default display order: descending qubit index, so the rendered bitstring
/// reads qubit n-1 first.
pub fn default_display_order(num_qubits: usize) -> Vec<usize> {
    (0..num_qubits).rev().collect()
}

impl Circuit {
    /// Assemble a circuit from already-validated parts (builtins only).
    pub(crate) fn from_parts(
        num_qubits: usize,
        ops: Vec<CircuitOp>,
        display_order: Vec<usize>,
        topology: Option<StarTopology>,
    ) -> Circuit {
        Circuit {
            num_qubits,
            ops,
            display_order,
            topology,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn display_order(&self) -> &[usize] {
        &self.display_order
    }

    pub fn topology(&self) -> Option<StarTopology> {
        self.topology
    }

    /// Parse the line-oriented grammar; every failure reports its line.
    pub fn parse(text: &str) -> Result<Circuit> {
        Parser::default().run(text)
    }

    /// Canonical source text; `parse(render())` is structurally identical.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("qubits {}\n", self.num_qubits));
        if let Some(t) = self.topology {
            out.push_str(&format!("topology star {}\n", t.center));
        }
        if self.display_order != default_display_order(self.num_qubits) {
            let order: Vec<String> = self.display_order.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("order {}\n", order.join(" ")));
        }
        for op in &self.ops {
            match op {
                CircuitOp::Gate { kind, qubit } => {
                    out.push_str(&format!("{} {}\n", kind.name(), qubit));
                }
                CircuitOp::Cx { control, target } => {
                    out.push_str(&format!("cx {} {}\n", control, target));
                }
                CircuitOp::Measure(MeasureTarget::All) => out.push_str("measure all\n"),
                CircuitOp::Measure(MeasureTarget::Qubit(q)) => {
                    out.push_str(&format!("measure {}\n", q));
                }
            }
        }
        out
    }

    /// Run the gate ops from the ground state. Measure ops are markers and
    /// do not collapse anything.
    pub fn execute(&self) -> Result<StateVector> {
        self.execute_from(&StateVector::ground(self.num_qubits)?)
    }

    /// Run the gate ops from a caller-supplied initial state.
    pub fn execute_from(&self, initial: &StateVector) -> Result<StateVector> {
        if initial.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.num_qubits,
                actual: initial.dimension(),
            });
        }
        let mut state = initial.clone();
        for op in &self.ops {
            state = match op {
                CircuitOp::Gate { kind, qubit } => {
                    state.apply_single_qubit_gate(&kind.matrix(), *qubit)?
                }
                CircuitOp::Cx { control, target } => state.apply_cnot(*control, *target)?,
                CircuitOp::Measure(_) => state,
            };
        }
        Ok(state)
    }
}

#[derive(Default)]
struct Parser {
    num_qubits: Option<usize>,
    topology: Option<StarTopology>,
    order: Option<Vec<usize>>,
    ops: Vec<CircuitOp>,
    measured: bool,
    has_gate_op: bool,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Circuit> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let keyword = tokens[0].to_ascii_lowercase();
            self.line(line_no, &keyword, &tokens[1..])?;
        }
        let num_qubits = self
            .num_qubits
            .ok_or_else(|| Error::parse(0, "missing 'qubits' directive"))?;
        Ok(Circuit {
            num_qubits,
            ops: self.ops,
            display_order: self
                .order
                .unwrap_or_else(|| default_display_order(num_qubits)),
            topology: self.topology,
        })
    }

    fn require_qubits(&self, line: usize) -> Result<usize> {
        self.num_qubits
            .ok_or_else(|| Error::parse(line, "'qubits' directive must come first"))
    }

    fn qubit_index(&self, line: usize, token: &str) -> Result<usize> {
        let n = self.require_qubits(line)?;
        let q: usize = token
            .parse()
            .map_err(|_| Error::parse(line, format!("'{token}' is not a qubit index")))?;
        if q >= n {
            return Err(Error::parse(
                line,
                format!("qubit {q} out of range for {n} qubits"),
            ));
        }
        Ok(q)
    }

    fn expect_arity(line: usize, keyword: &str, args: &[&str], want: usize) -> Result<()> {
        if args.len() != want {
            return Err(Error::parse(
                line,
                format!("'{keyword}' expects {want} argument(s), got {}", args.len()),
            ));
        }
        Ok(())
    }

    fn line(&mut self, line: usize, keyword: &str, args: &[&str]) -> Result<()> {
        match keyword {
            "qubits" => {
                Self::expect_arity(line, keyword, args, 1)?;
                if self.num_qubits.is_some() {
                    return Err(Error::parse(line, "duplicate 'qubits' directive"));
                }
                let n: usize = args[0].parse().map_err(|_| {
                    Error::parse(line, format!("'{}' is not a register size", args[0]))
                })?;
                if !(1..=crate::state::MAX_QUBITS).contains(&n) {
                    return Err(Error::parse(
                        line,
                        format!("register size {n} outside 1..=20"),
                    ));
                }
                self.num_qubits = Some(n);
            }
            "topology" => {
                if args.len() != 2 || !args[0].eq_ignore_ascii_case("star") {
                    return Err(Error::parse(line, "expected 'topology star <center>'"));
                }
                if self.topology.is_some() {
                    return Err(Error::parse(line, "duplicate 'topology' directive"));
                }
                if self.has_gate_op {
                    return Err(Error::parse(
                        line,
                        "'topology' must precede all gate operations",
                    ));
                }
                let center = self.qubit_index(line, args[1])?;
                self.topology = Some(StarTopology { center });
            }
            "order" => {
                if self.order.is_some() {
                    return Err(Error::parse(line, "duplicate 'order' directive"));
                }
                let n = self.require_qubits(line)?;
                let order = args
                    .iter()
                    .map(|t| self.qubit_index(line, t))
                    .collect::<Result<Vec<usize>>>()?;
                let mut seen = vec![false; n];
                for &q in &order {
                    seen[q] = true;
                }
                if order.len() != n || !seen.iter().all(|&s| s) {
                    return Err(Error::parse(
                        line,
                        "'order' must list every qubit exactly once",
                    ));
                }
                self.order = Some(order);
            }
            "cx" => {
                Self::expect_arity(line, keyword, args, 2)?;
                self.gate_allowed(line, keyword)?;
                let control = self.qubit_index(line, args[0])?;
                let target = self.qubit_index(line, args[1])?;
                if control == target {
                    return Err(Error::parse(line, "cx control and target must differ"));
                }
                if let Some(t) = self.topology {
                    if control != t.center && target != t.center {
                        return Err(Error::parse(
                            line,
                            format!("cx {control} {target} bypasses star center {}", t.center),
                        ));
                    }
                }
                self.ops.push(CircuitOp::Cx { control, target });
                self.has_gate_op = true;
            }
            "measure" => {
                Self::expect_arity(line, keyword, args, 1)?;
                self.require_qubits(line)?;
                let target = if args[0].eq_ignore_ascii_case("all") {
                    MeasureTarget::All
                } else {
                    MeasureTarget::Qubit(self.qubit_index(line, args[0])?)
                };
                self.ops.push(CircuitOp::Measure(target));
                self.measured = true;
            }
            gate => match GateKind::from_name(gate) {
                Some(kind) => {
                    Self::expect_arity(line, keyword, args, 1)?;
                    self.gate_allowed(line, gate)?;
                    let qubit = self.qubit_index(line, args[0])?;
                    self.ops.push(CircuitOp::Gate { kind, qubit });
                    self.has_gate_op = true;
                }
                None => {
                    return Err(Error::parse(line, format!("unknown gate '{gate}'")));
                }
            },
        }
        Ok(())
    }

    fn gate_allowed(&self, line: usize, gate: &str) -> Result<()> {
        if self.measured {
            return Err(Error::parse(
                line,
                format!("gate '{gate}' after a measurement; measurements are terminal"),
            ));
        }
        Ok(())
    }
}
