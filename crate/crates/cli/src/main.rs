//! Command-line harness: run circuit files, reproduce the built-in
//! experiments, check envariance of user-supplied configurations, and sweep
//! noise grids. Exit codes: 0 success, 2 input/parse error, 64 usage error.

mod input;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use envarium::builtins::{builtin_experiment, envariance_config};
use envarium::envariance::check_envariance;
use envarium::noise::{run_noisy, sweep_fidelity};
use envarium::sampling::{bhattacharyya, exact_distribution, sample};
use envarium::{Circuit, EnvarianceReport, GateMatrix, OutcomeHistogram};

const USAGE_EXIT: u8 = 64;
const INPUT_EXIT: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed inputs: exit 2.
    Input(String),
    /// Bad invocations: exit 64.
    Usage(String),
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => INPUT_EXIT,
            CliError::Usage(_) => USAGE_EXIT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Usage(m) => m,
        }
    }
}

impl From<envarium::Error> for CliError {
    fn from(err: envarium::Error) -> Self {
        match err {
            envarium::Error::UnknownExperiment(_) => CliError::Usage(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "envarium",
    version,
    about = "Statevector simulator with an envariance engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, execute and sample a circuit file.
    Run {
        circuit: PathBuf,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        /// Defaults to ENVARIUM_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// JSON file {"p1": .., "p2": .., "p_ro": ..} enabling trajectory noise.
        #[arg(long, conflicts_with_all = ["p1", "p2", "p_ro"])]
        noise: Option<PathBuf>,
        /// Single-qubit Pauli error probability (flag form of the config).
        #[arg(long)]
        p1: Option<f64>,
        /// Two-qubit Pauli error probability after each cx.
        #[arg(long)]
        p2: Option<f64>,
        /// Per-qubit readout bit-flip probability.
        #[arg(long)]
        p_ro: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// JSON file mapping bitstrings to probabilities; adds the
        /// Bhattacharyya fidelity of the run against it.
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Run a built-in experiment end to end: theory row, sampled
    /// frequencies, fidelity and the envariance report.
    Experiment {
        /// One of fig1, figc1, fig2, fig3, fig4, fig5.
        name: String,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, conflicts_with_all = ["p1", "p2", "p_ro"])]
        noise: Option<PathBuf>,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        p2: Option<f64>,
        #[arg(long)]
        p_ro: Option<f64>,
    },
    /// Decide envariance of STATE under UNITARY ⊗ I for PARTITION.
    Check {
        /// Circuit file, `.json` amplitude file, or inline amplitudes "1,0,0,1".
        state: String,
        /// Named gate product like "x", "h.x", "x,x", or a JSON matrix file.
        unitary: String,
        /// System/environment split like "1/0" or "4,3,2/1,0".
        partition: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run a circuit across a grid of noise parameters and report the
    /// fidelity against its noiseless distribution.
    SweepNoise {
        circuit: PathBuf,
        /// JSON array of {"p1": .., "p2": .., "p_ro": ..}.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(USAGE_EXIT);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("ENVARIUM_SEED") {
        Ok(value) => value.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "ENVARIUM_SEED must be an unsigned integer, got '{value}'"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn read_circuit(path: &PathBuf) -> Result<Circuit, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read '{}': {e}", path.display())))?;
    Ok(Circuit::parse(&text)?)
}

/// Noise from either the JSON config or the flag triple; any flag present
/// turns the model on with the other probabilities defaulting to zero.
fn resolve_noise(
    config: Option<PathBuf>,
    p1: Option<f64>,
    p2: Option<f64>,
    p_ro: Option<f64>,
) -> Result<Option<envarium::NoiseParams>, CliError> {
    if let Some(path) = config {
        return Ok(Some(input::load_noise(&path)?));
    }
    if p1.is_none() && p2.is_none() && p_ro.is_none() {
        return Ok(None);
    }
    Ok(Some(envarium::NoiseParams::new(
        p1.unwrap_or(0.0),
        p2.unwrap_or(0.0),
        p_ro.unwrap_or(0.0),
    )?))
}

#[derive(Serialize)]
struct RunOutput<'a> {
    shots: u64,
    seed: u64,
    counts: &'a BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity_b: Option<f64>,
}

#[derive(Serialize)]
struct TableRow {
    outcome: String,
    theory: f64,
    frequency: f64,
}

#[derive(Serialize)]
struct EnvarianceOutput {
    envariant: bool,
    residual_condition: f64,
    residual_restore: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    assisting_unitary: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize)]
struct ExperimentResult {
    name: String,
    theory: BTreeMap<String, f64>,
    histogram: OutcomeHistogram,
    fidelity_b: f64,
    envariance: EnvarianceOutput,
    table: Vec<TableRow>,
}

fn matrix_rows(gate: &GateMatrix) -> Vec<Vec<[f64; 2]>> {
    let m = gate.matrix();
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn envariance_output(report: &EnvarianceReport) -> EnvarianceOutput {
    EnvarianceOutput {
        envariant: report.envariant,
        residual_condition: report.residual_condition,
        residual_restore: report.residual_restore,
        assisting_unitary: report.assisting_unitary.as_ref().map(matrix_rows),
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            circuit,
            shots,
            seed,
            noise,
            p1,
            p2,
            p_ro,
            format,
            theory,
        } => {
            let seed = resolve_seed(seed)?;
            let circuit = read_circuit(&circuit)?;
            let histogram = match resolve_noise(noise, p1, p2, p_ro)? {
                Some(params) => run_noisy(&circuit, &params, shots, seed)?,
                None => {
                    let state = circuit.execute()?;
                    sample(&state, shots, seed, circuit.display_order())?
                }
            };
            let fidelity = theory
                .map(|path| -> Result<f64, CliError> {
                    let dist = input::load_theory(&path)?;
                    Ok(bhattacharyya(&histogram.frequencies(), dist.probs())?)
                })
                .transpose()?;
            match format {
                Format::Json => {
                    let out = RunOutput {
                        shots: histogram.shots,
                        seed: histogram.seed,
                        counts: &histogram.counts,
                        fidelity_b: fidelity,
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&out).expect("serializable")
                    );
                }
                Format::Csv => {
                    print!("{}", histogram.to_csv());
                    if let Some(b) = fidelity {
                        println!("# B={b}");
                    }
                }
            }
            Ok(())
        }

        Command::Experiment {
            name,
            shots,
            seed,
            noise,
            p1,
            p2,
            p_ro,
        } => {
            let seed = resolve_seed(seed)?;
            let circuit = builtin_experiment(&name)?;
            let final_state = circuit.execute()?;
            let theory = exact_distribution(&final_state, circuit.display_order())?;

            let histogram = match resolve_noise(noise, p1, p2, p_ro)? {
                Some(params) => run_noisy(&circuit, &params, shots, seed)?,
                None => sample(&final_state, shots, seed, circuit.display_order())?,
            };
            let fidelity_b = bhattacharyya(&histogram.frequencies(), theory.probs())?;

            let config = envariance_config(&name)?;
            let prepared = config.prepared_state()?;
            let report = check_envariance(
                &prepared,
                &config.system_unitary,
                &config.bipartition,
                envarium::envariance::DEFAULT_TOLERANCE,
            )?;

            let table = experiment_table(&name, theory.probs(), &histogram);
            let result = ExperimentResult {
                name,
                theory: theory.probs().clone(),
                histogram,
                fidelity_b,
                envariance: envariance_output(&report),
                table,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&result).expect("serializable")
            );
            Ok(())
        }

        Command::Check {
            state,
            unitary,
            partition,
            tol,
        } => {
            let state = input::parse_state(&state)?;
            let u_s = input::parse_unitary(&unitary)?;
            let part = input::parse_partition(&partition)?;
            let report = check_envariance(&state, &u_s, &part, tol)?;
            #[derive(Serialize)]
            struct CheckOutput {
                envariant: bool,
                residual_condition: f64,
                residual_restore: f64,
                assisting_unitary: Option<Vec<Vec<[f64; 2]>>>,
            }
            let out = CheckOutput {
                envariant: report.envariant,
                residual_condition: report.residual_condition,
                residual_restore: report.residual_restore,
                assisting_unitary: report.assisting_unitary.as_ref().map(matrix_rows),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("serializable")
            );
            Ok(())
        }

        Command::SweepNoise {
            circuit,
            grid,
            shots,
            seed,
            format,
        } => {
            let seed = resolve_seed(seed)?;
            let circuit = read_circuit(&circuit)?;
            let grid = input::load_noise_grid(&grid)?;
            let theory = exact_distribution(&circuit.execute()?, circuit.display_order())?;
            let sweep = sweep_fidelity(&circuit, &theory, &grid, shots, seed)?;
            #[derive(Serialize)]
            struct SweepRow {
                p1: f64,
                p2: f64,
                p_ro: f64,
                fidelity_b: f64,
            }
            let rows: Vec<SweepRow> = sweep
                .iter()
                .map(|(p, b)| SweepRow {
                    p1: p.p1,
                    p2: p.p2,
                    p_ro: p.p_ro,
                    fidelity_b: *b,
                })
                .collect();
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&rows).expect("serializable")
                ),
                Format::Csv => {
                    println!("p1,p2,p_ro,fidelity_b");
                    for row in rows {
                        println!("{},{},{},{}", row.p1, row.p2, row.p_ro, row.fidelity_b);
                    }
                }
            }
            Ok(())
        }
    }
}

/// Frequency table following the usual reporting convention: the five-qubit
/// experiment collapses the 30 non-target outcomes into one "other" row,
/// everything else lists the full outcome set lexicographically.
fn experiment_table(
    name: &str,
    theory: &BTreeMap<String, f64>,
    histogram: &OutcomeHistogram,
) -> Vec<TableRow> {
    let freqs = histogram.frequencies();
    if name == "fig3" {
        let targets = ["00000", "11111"];
        // fold from +0.0: an empty Sum<f64> would yield -0.0 in the JSON
        let other_freq: f64 = freqs
            .iter()
            .filter(|(k, _)| !targets.contains(&k.as_str()))
            .fold(0.0, |acc, (_, v)| acc + v);
        let mut rows: Vec<TableRow> = targets
            .iter()
            .map(|t| TableRow {
                outcome: t.to_string(),
                theory: theory.get(*t).copied().unwrap_or(0.0),
                frequency: freqs.get(*t).copied().unwrap_or(0.0),
            })
            .collect();
        rows.push(TableRow {
            outcome: "other".to_string(),
            theory: 0.0,
            frequency: other_freq,
        });
        return rows;
    }

    let num_qubits = theory.keys().next().map_or(0, String::len);
    (0..1usize << num_qubits)
        .map(|i| {
            let outcome = format!("{i:0width$b}", width = num_qubits);
            TableRow {
                theory: theory.get(&outcome).copied().unwrap_or(0.0),
                frequency: freqs.get(&outcome).copied().unwrap_or(0.0),
                outcome,
            }
        })
        .collect()
}
