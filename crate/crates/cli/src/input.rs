//! Parsing of user-supplied state, unitary, partition and config inputs.

use std::path::Path;

use num_complex::Complex64;

use envarium::matrix::CMatrix;
use envarium::sampling::Distribution;
use envarium::{Bipartition, Circuit, GateMatrix, NoiseParams, StateVector};

use crate::CliError;

/// A state spec is either a path (circuit source, or a `.json` amplitude
/// list of [re, im] pairs) or an inline comma-separated amplitude list.
/// Inline and file amplitude lists are normalized before use.
pub fn parse_state(spec: &str) -> Result<StateVector, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read '{spec}': {e}")))?;
        if path.extension().is_some_and(|e| e == "json") {
            let amps = parse_amplitude_json(&text)?;
            return StateVector::from_amplitudes_normalized(amps).map_err(CliError::from);
        }
        let circuit = Circuit::parse(&text)?;
        return circuit.execute().map_err(CliError::from);
    }
    let amps = spec
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<Complex64>, CliError>>()?;
    StateVector::from_amplitudes_normalized(amps).map_err(CliError::from)
}

fn parse_amplitude_json(text: &str) -> Result<Vec<Complex64>, CliError> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| CliError::input(format!("amplitude file must be [[re, im], ...]: {e}")))?;
    Ok(pairs
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect())
}

/// "1", "-0.5", "2i", "-i", "1+2i", "0.5-0.5i".
pub fn parse_complex(token: &str) -> Result<Complex64, CliError> {
    let s: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::input(format!("'{token}' is not a complex amplitude"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(im_part) = s.strip_suffix('i') {
        // split a trailing imaginary term off an optional real part
        for split in (1..im_part.len()).rev() {
            let c = im_part.as_bytes()[split];
            if (c == b'+' || c == b'-') && !matches!(im_part.as_bytes()[split - 1], b'e' | b'E') {
                let re: f64 = im_part[..split].parse().map_err(|_| bad())?;
                let im = parse_signed_or_unit(&im_part[split..]).ok_or_else(bad)?;
                return Ok(Complex64::new(re, im));
            }
        }
        let im = parse_signed_or_unit(im_part).ok_or_else(bad)?;
        return Ok(Complex64::new(0.0, im));
    }
    Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0))
}

fn parse_signed_or_unit(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        other => other.parse().ok(),
    }
}

/// A unitary spec is either a path to a JSON matrix (array of rows of
/// [re, im] pairs) or a named gate product: layers separated by '.' or '*'
/// are matrix-multiplied left to right (rightmost acts first on the state);
/// within a layer, comma-separated gate names are Kronecker factors across
/// the system qubits in partition order. "h.x" is H·X, "x,x" is X⊗X.
pub fn parse_unitary(spec: &str) -> Result<GateMatrix, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read '{spec}': {e}")))?;
        return parse_matrix_json(&text);
    }

    let mut product: Option<GateMatrix> = None;
    for layer in spec.split(['.', '*']) {
        let mut kron: Option<GateMatrix> = None;
        for name in layer.split(',') {
            let name = name.trim().to_ascii_lowercase();
            let gate = GateMatrix::by_name(&name)
                .ok_or_else(|| CliError::input(format!("unknown gate '{name}'")))?;
            kron = Some(match kron {
                None => gate,
                Some(acc) => acc.kron(&gate),
            });
        }
        let layer_gate = kron.ok_or_else(|| CliError::input(format!("empty layer in '{spec}'")))?;
        product = Some(match product {
            None => layer_gate,
            Some(acc) => acc.matmul(&layer_gate)?,
        });
    }
    product.ok_or_else(|| CliError::input(format!("empty unitary spec '{spec}'")))
}

pub fn parse_matrix_json(text: &str) -> Result<GateMatrix, CliError> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| {
        CliError::input(format!(
            "matrix file must be an array of rows of [re, im] pairs: {e}"
        ))
    })?;
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect()
        })
        .collect();
    Ok(GateMatrix::from_matrix(CMatrix::from_rows(&rows)?)?)
}

/// "s_qubits/e_qubits" with comma-separated indices, e.g. "4,3,2/1,0".
pub fn parse_partition(spec: &str) -> Result<Bipartition, CliError> {
    let (s_part, e_part) = spec
        .split_once('/')
        .ok_or_else(|| CliError::input(format!("partition '{spec}' must look like '1/0'")))?;
    let parse_list = |part: &str| -> Result<Vec<usize>, CliError> {
        part.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::input(format!("'{t}' is not a qubit index")))
            })
            .collect()
    };
    Ok(Bipartition::new(parse_list(s_part)?, parse_list(e_part)?)?)
}

pub fn load_noise(path: &Path) -> Result<NoiseParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read '{}': {e}", path.display())))?;
    let params: NoiseParams = serde_json::from_str(&text).map_err(|e| {
        CliError::input(format!(
            "noise config must be {{\"p1\", \"p2\", \"p_ro\"}}: {e}"
        ))
    })?;
    params.validate()?;
    Ok(params)
}

pub fn load_noise_grid(path: &Path) -> Result<Vec<NoiseParams>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read '{}': {e}", path.display())))?;
    let grid: Vec<NoiseParams> = serde_json::from_str(&text).map_err(|e| {
        CliError::input(format!(
            "noise grid must be an array of {{\"p1\", \"p2\", \"p_ro\"}}: {e}"
        ))
    })?;
    if grid.is_empty() {
        return Err(CliError::input("noise grid is empty".to_string()));
    }
    for params in &grid {
        params.validate()?;
    }
    Ok(grid)
}

pub fn load_theory(path: &Path) -> Result<Distribution, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read '{}': {e}", path.display())))?;
    let probs: std::collections::BTreeMap<String, f64> =
        serde_json::from_str(&text).map_err(|e| {
            CliError::input(format!("theory must map bitstrings to probabilities: {e}"))
        })?;
    Ok(Distribution::from_probs(probs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_token_forms() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(
            parse_complex("0.5-0.5i").unwrap(),
            Complex64::new(0.5, -0.5)
        );
        assert_eq!(parse_complex("1e-3i").unwrap(), Complex64::new(0.0, 1e-3));
        assert!(parse_complex("chaos").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn inline_state_is_normalized() {
        let s = parse_state("1,0,0,1").unwrap();
        assert!((s.probability(0) - 0.5).abs() < 1e-12);
        assert!((s.probability(3) - 0.5).abs() < 1e-12);
        assert!(parse_state("1,0,0").is_err()); // not a power of two
        assert!(parse_state("0,0,0,0").is_err()); // zero vector
    }

    #[test]
    fn unitary_products_and_krons() {
        let hx = parse_unitary("h.x").unwrap();
        let expect = GateMatrix::h().matmul(&GateMatrix::x()).unwrap();
        assert!(hx.phase_distance(&expect) < 1e-12);

        let xx = parse_unitary("x,x").unwrap();
        assert_eq!(xx.dimension(), 4);
        assert!(xx.phase_distance(&GateMatrix::x().kron(&GateMatrix::x())) < 1e-12);

        assert!(parse_unitary("h.q").is_err());
        assert!(parse_unitary("h,").is_err());
    }

    #[test]
    fn partition_spec_forms() {
        let p = parse_partition("4,3,2/1,0").unwrap();
        assert_eq!(p.s_qubits(), &[4, 3, 2]);
        assert_eq!(p.e_qubits(), &[1, 0]);
        assert!(parse_partition("1-0").is_err());
        assert!(parse_partition("1/1").is_err());
    }
}
