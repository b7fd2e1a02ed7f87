//! Command-line front end: generate, lower, run, track, verify, bench.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or format error,
//! 3 simulator capacity exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use pauli_track::circuit::{
    lower_clifford_t, parse_circuit, parse_ext_circuit, random_circuit, serialize_circuit,
    GateWeights,
};
use pauli_track::sim::{
    derive_tau_cnot_table, derive_tau_rotation_table, diff_to_text, execute, RunMode, SimError,
    StateVector, MAX_CIRCUIT_QUBITS,
};
use pauli_track::tracker::{
    expected_correction_count, rotation_table, synthesize_record, tau_cnot, track,
    MeasurementRecord,
};
use pauli_track::verify::{deferred_equivalence, TrialConfig};
use pauli_track::{Circuit, PauliStatus};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pauli-track",
    about = "Track teleportation byproduct corrections through quantum circuits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Immediate,
    Deferred,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputKind {
    /// |0...0⟩
    Zeros,
    /// Seeded pseudo-random state (see --input-seed).
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random circuit.
    Gen {
        /// Number of qubits.
        #[arg(short = 'n', long = "qubits")]
        qubits: usize,
        /// Number of gates.
        #[arg(short = 'm', long = "gates")]
        gates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative weights as cnot,rx4,rz4,rz8 (default uniform).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Output path (stdout when omitted).
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Lower a {CNOT, H, P, T} circuit onto the teleportation gate set.
    Lower {
        input: PathBuf,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Execute a circuit through the teleportation protocol.
    Run {
        circuit: PathBuf,
        #[arg(short, long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = InputKind::Zeros)]
        input: InputKind,
        #[arg(long, default_value_t = 0)]
        input_seed: u64,
        /// Measurement record output (required in deferred mode).
        #[arg(long)]
        record_out: Option<PathBuf>,
        /// Final-state amplitude dump (stdout when omitted).
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Compute the output correction frame from a circuit and its record.
    Track {
        circuit: PathBuf,
        record: PathBuf,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Randomized end-to-end equivalence suite plus rule certification.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 25)]
        max_m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the rule diff artifact.
        #[arg(long, default_value = "tau_table.diff")]
        diff_out: PathBuf,
        /// Run trials sequentially.
        #[arg(long)]
        sequential: bool,
    },
    /// Time the tracker on synthesized records.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 1100, 5100])]
        n_list: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            default_values_t = vec![1000usize, 5000, 10000, 20000, 50000]
        )]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timing samples per row (median reported).
        #[arg(long, default_value_t = 21)]
        repeats: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn sim_failure(err: SimError) -> Failure {
    let code = match err {
        SimError::Capacity => EXIT_CAPACITY,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            qubits,
            gates,
            seed,
            weights,
            out,
        } => cmd_gen(qubits, gates, seed, weights, out),
        Command::Lower { input, out } => cmd_lower(&input, out),
        Command::Run {
            circuit,
            mode,
            seed,
            input,
            input_seed,
            record_out,
            state_out,
        } => cmd_run(
            &circuit, mode, seed, input, input_seed, record_out, state_out,
        ),
        Command::Track {
            circuit,
            record,
            out,
        } => cmd_track(&circuit, &record, out),
        Command::Verify {
            trials,
            max_n,
            max_m,
            seed,
            diff_out,
            sequential,
        } => cmd_verify(trials, max_n, max_m, seed, &diff_out, sequential),
        Command::Bench {
            n_list,
            m_list,
            seed,
            repeats,
        } => cmd_bench(&n_list, &m_list, seed, repeats),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(out: Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = read_file(path)?;
    parse_circuit(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_gen(
    qubits: usize,
    gates: usize,
    seed: u64,
    weights: Option<Vec<f64>>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let weights = match weights {
        Some(parts) if parts.len() == 4 => GateWeights {
            cnot: parts[0],
            rx4: parts[1],
            rz4: parts[2],
            rz8: parts[3],
        },
        Some(parts) => {
            return Err(Failure::input(format!(
                "--weights takes four values (cnot,rx4,rz4,rz8), found {}",
                parts.len()
            )));
        }
        None => GateWeights::uniform(),
    };
    let circuit =
        random_circuit(qubits, gates, seed, &weights).map_err(|e| Failure::input(e.to_string()))?;
    write_output(out, &serialize_circuit(&circuit))
}

fn cmd_lower(input: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = read_file(input)?;
    let ext = parse_ext_circuit(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
    let lowered = lower_clifford_t(&ext);
    write_output(out, &serialize_circuit(&lowered))
}

fn format_state(state: &StateVector) -> String {
    // One amplitude per line, fixed point, negative zero normalised away so
    // equal states dump to identical bytes.
    let clean = |v: f64| if v == 0.0 { 0.0 } else { v };
    let mut text = String::new();
    for amp in state.amplitudes() {
        let _ = writeln!(text, "{:.12} {:.12}", clean(amp.re), clean(amp.im));
    }
    text
}

fn cmd_run(
    circuit_path: &Path,
    mode: Mode,
    seed: u64,
    input: InputKind,
    input_seed: u64,
    record_out: Option<PathBuf>,
    state_out: Option<PathBuf>,
) -> Result<(), Failure> {
    let circuit = load_circuit(circuit_path)?;
    if circuit.qubit_count() > MAX_CIRCUIT_QUBITS {
        return Err(Failure {
            code: EXIT_CAPACITY,
            message: format!(
                "circuit has {} qubits; the simulator supports at most {}",
                circuit.qubit_count(),
                MAX_CIRCUIT_QUBITS
            ),
        });
    }
    if mode == Mode::Deferred && record_out.is_none() {
        return Err(Failure::input(
            "deferred mode writes a measurement record; pass --record-out",
        ));
    }

    let input_state = match input {
        InputKind::Zeros => StateVector::zeros(circuit.qubit_count()),
        InputKind::Random => StateVector::seeded_random(circuit.qubit_count(), input_seed),
    };

    let run_mode = match mode {
        Mode::Immediate => RunMode::Immediate,
        Mode::Deferred => RunMode::Deferred,
    };
    let result = execute(&circuit, run_mode, &input_state, seed).map_err(sim_failure)?;

    if let Some(path) = record_out {
        std::fs::write(&path, result.record.to_text())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    write_output(state_out, &format_state(&result.final_state))
}

fn cmd_track(circuit_path: &Path, record_path: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let circuit = load_circuit(circuit_path)?;
    let record_text = read_file(record_path)?;
    let record = MeasurementRecord::parse(&record_text, &circuit)
        .map_err(|e| Failure::input(format!("{}: {e}", record_path.display())))?;
    let frame = track(&circuit, &record).map_err(|e| Failure::input(e.to_string()))?;
    write_output(out, &frame.to_text())
}

fn cmd_verify(
    trials: usize,
    max_n: usize,
    max_m: usize,
    seed: u64,
    diff_out: &Path,
    sequential: bool,
) -> Result<(), Failure> {
    if max_n > MAX_CIRCUIT_QUBITS {
        return Err(Failure::input(format!(
            "--max-n {max_n} exceeds the simulator capacity of {MAX_CIRCUIT_QUBITS}"
        )));
    }

    let mut config = TrialConfig::new(trials, max_n.max(1), max_m.max(1), seed);
    config.parallel = !sequential;
    let summary = deferred_equivalence(&config);
    println!(
        "deferred equivalence: {}/{} passed",
        summary.passed, summary.total
    );
    let mut failed = !summary.all_passed();
    if let Some(failure) = &summary.first_failure {
        println!("first counterexample (trial {}):", failure.trial);
        println!("  run seed: {}", failure.run_seed);
        println!("  detail: {}", failure.detail);
        print!("{}", indent(&failure.circuit, "  | "));
        if let Some(record) = &failure.record {
            println!("  record:");
            print!("{}", indent(record, "  | "));
        }
    }

    let cnot = derive_tau_cnot_table().map_err(|e| Failure {
        code: EXIT_VERIFICATION,
        message: e.to_string(),
    })?;
    let mut matches = 0;
    for control in PauliStatus::ALL {
        for target in PauliStatus::ALL {
            if cnot.0[control.bits() as usize][target.bits() as usize] == tau_cnot(control, target)
            {
                matches += 1;
            }
        }
    }
    println!("cnot tau table: {matches}/16 match the propagation equations");
    failed |= matches != 16;

    let (table, diff) = derive_tau_rotation_table().map_err(|e| Failure {
        code: EXIT_VERIFICATION,
        message: e.to_string(),
    })?;
    let shipped_ok = table == rotation_table();
    println!(
        "rotation tau table: shipped table {} the certified table",
        if shipped_ok {
            "matches"
        } else {
            "DIFFERS FROM"
        }
    );
    failed |= !shipped_ok;

    println!(
        "rule diff vs the published reference table ({} rows):",
        diff.len()
    );
    print!("{}", indent(&diff_to_text(&diff), "  "));
    std::fs::write(diff_out, diff_to_text(&diff))
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", diff_out.display())))?;
    println!("wrote {}", diff_out.display());

    if failed {
        Err(Failure {
            code: EXIT_VERIFICATION,
            message: "verification failed".into(),
        })
    } else {
        Ok(())
    }
}

fn indent(text: &str, prefix: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let _ = writeln!(out, "{prefix}{line}");
    }
    out
}

fn median_duration(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    samples[samples.len() / 2]
}

fn cmd_bench(n_list: &[usize], m_list: &[usize], seed: u64, repeats: usize) -> Result<(), Failure> {
    if repeats == 0 {
        return Err(Failure::input("--repeats must be at least 1"));
    }
    println!(
        "{:>6} {:>7} {:>12} {:>14} {:>20}",
        "n", "m", "rt_seconds", "corr_tracked", "corr_expected_raw"
    );
    for &qubits in n_list {
        for &gates in m_list {
            let row_seed = seed ^ ((qubits as u64) << 32) ^ gates as u64;
            let circuit = random_circuit(qubits, gates, row_seed, &GateWeights::uniform())
                .map_err(|e| Failure::input(e.to_string()))?;
            let record = synthesize_record(&circuit, row_seed.wrapping_add(1));

            // Timing covers the tracking pass only.
            let frame = track(&circuit, &record).map_err(|e| Failure::input(e.to_string()))?;
            let samples: Vec<Duration> = (0..repeats)
                .map(|_| {
                    let started = Instant::now();
                    let frame = track(&circuit, &record).expect("same inputs as above");
                    let elapsed = started.elapsed();
                    std::hint::black_box(frame);
                    elapsed
                })
                .collect();
            let rt = median_duration(samples);

            println!(
                "{:>6} {:>7} {:>12.6} {:>14} {:>20.2}",
                qubits,
                gates,
                rt.as_secs_f64(),
                frame.correction_count(),
                expected_correction_count(&circuit)
            );
        }
    }
    Ok(())
}
