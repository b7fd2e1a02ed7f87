//! Randomized end-to-end equivalence suites.
//!
//! Each trial draws a circuit, an input state and a protocol seed from its
//! own deterministic stream, runs the protocol, and compares against direct
//! matrix application up to global phase. Trials are independent and run in
//! parallel when the `parallel` feature is active and `parallel` is set in
//! the config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::PauliStatus;
use crate::circuit::{
    lower_clifford_t, random_circuit, random_clifford_t_circuit, serialize_circuit,
    serialize_ext_circuit, GateWeights,
};
use crate::par::map_indexed;
use crate::sim::{equal_up_to_phase, execute, ideal_apply, ideal_apply_ext, RunMode, StateVector};
use crate::tracker::track;

#[derive(Clone, Copy, Debug)]
pub struct TrialConfig {
    pub trials: usize,
    pub max_qubits: usize,
    pub max_gates: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub parallel: bool,
}

impl TrialConfig {
    pub fn new(trials: usize, max_qubits: usize, max_gates: usize, seed: u64) -> TrialConfig {
        TrialConfig {
            trials,
            max_qubits,
            max_gates,
            seed,
            tolerance: 1e-9,
            parallel: true,
        }
    }
}

/// Reproduction data for the first failed trial.
#[derive(Clone, Debug)]
pub struct TrialFailure {
    pub trial: usize,
    pub circuit: String,
    pub record: Option<String>,
    pub run_seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct TrialSummary {
    pub passed: usize,
    pub total: usize,
    pub first_failure: Option<TrialFailure>,
}

impl TrialSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }

    fn collect(results: Vec<Result<(), TrialFailure>>) -> TrialSummary {
        let total = results.len();
        let passed = results.iter().filter(|r| r.is_ok()).count();
        let first_failure = results.into_iter().find_map(Result::err);
        TrialSummary {
            passed,
            total,
            first_failure,
        }
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn draw_circuit(cfg: &TrialConfig, rng: &mut ChaCha8Rng) -> crate::circuit::Circuit {
    let qubits = rng.gen_range(1..=cfg.max_qubits);
    let gates = rng.gen_range(1..=cfg.max_gates);
    let weights = if qubits >= 2 {
        GateWeights::uniform()
    } else {
        GateWeights::rotations_only()
    };
    random_circuit(qubits, gates, rng.gen(), &weights).expect("parameters are valid")
}

/// Deferred run + tracking + frame application must reproduce direct matrix
/// application.
pub fn deferred_equivalence(cfg: &TrialConfig) -> TrialSummary {
    let results = map_indexed(cfg.trials, cfg.parallel, |trial| {
        let mut rng = trial_rng(cfg.seed, trial);
        let circuit = draw_circuit(cfg, &mut rng);
        let input = StateVector::random(circuit.qubit_count(), &mut rng);
        let run_seed: u64 = rng.gen();

        let fail = |record: Option<String>, detail: String| TrialFailure {
            trial,
            circuit: serialize_circuit(&circuit),
            record,
            run_seed,
            detail,
        };

        let run = execute(&circuit, RunMode::Deferred, &input, run_seed)
            .map_err(|e| fail(None, format!("deferred run failed: {e}")))?;
        if run.applied_corrections != 0 {
            return Err(fail(
                Some(run.record.to_text()),
                "deferred run applied corrections".into(),
            ));
        }
        let frame = track(&circuit, &run.record)
            .map_err(|e| fail(Some(run.record.to_text()), format!("tracking failed: {e}")))?;

        let mut corrected = run.final_state.clone();
        let labels: Vec<_> = corrected.labels().to_vec();
        for (slot, status) in frame.statuses().iter().enumerate() {
            if *status != PauliStatus::I {
                corrected
                    .apply_unitary1(labels[slot], &status.matrix())
                    .expect("status matrices are unitary");
            }
        }

        let ideal = ideal_apply(&circuit, &input).expect("dimensions match");
        if equal_up_to_phase(&corrected, &ideal, cfg.tolerance).expect("dimensions match") {
            Ok(())
        } else {
            Err(fail(
                Some(run.record.to_text()),
                "corrected output differs from direct application".into(),
            ))
        }
    });
    TrialSummary::collect(results)
}

/// Immediate-mode runs must already match direct application.
pub fn immediate_equivalence(cfg: &TrialConfig) -> TrialSummary {
    let results = map_indexed(cfg.trials, cfg.parallel, |trial| {
        let mut rng = trial_rng(cfg.seed ^ 0x494d4d, trial);
        let circuit = draw_circuit(cfg, &mut rng);
        let input = StateVector::random(circuit.qubit_count(), &mut rng);
        let run_seed: u64 = rng.gen();

        let run =
            execute(&circuit, RunMode::Immediate, &input, run_seed).map_err(|e| TrialFailure {
                trial,
                circuit: serialize_circuit(&circuit),
                record: None,
                run_seed,
                detail: format!("immediate run failed: {e}"),
            })?;
        let ideal = ideal_apply(&circuit, &input).expect("dimensions match");
        if equal_up_to_phase(&run.final_state, &ideal, cfg.tolerance).expect("dimensions match") {
            Ok(())
        } else {
            Err(TrialFailure {
                trial,
                circuit: serialize_circuit(&circuit),
                record: Some(run.record.to_text()),
                run_seed,
                detail: "immediate output differs from direct application".into(),
            })
        }
    });
    TrialSummary::collect(results)
}

/// Lowered {CNOT, H, P, T} circuits must act like the original matrices.
pub fn lowering_equivalence(cfg: &TrialConfig) -> TrialSummary {
    let results = map_indexed(cfg.trials, cfg.parallel, |trial| {
        let mut rng = trial_rng(cfg.seed ^ 0x4c4f57, trial);
        let qubits = rng.gen_range(1..=cfg.max_qubits);
        let gates = rng.gen_range(0..=cfg.max_gates);
        let ext = random_clifford_t_circuit(qubits, gates, rng.gen());
        let input = StateVector::random(qubits, &mut rng);

        let lowered = lower_clifford_t(&ext);
        let via_rotations = ideal_apply(&lowered, &input).expect("dimensions match");
        let direct = ideal_apply_ext(&ext, &input).expect("dimensions match");
        if equal_up_to_phase(&via_rotations, &direct, cfg.tolerance).expect("dimensions match") {
            Ok(())
        } else {
            Err(TrialFailure {
                trial,
                circuit: serialize_ext_circuit(&ext),
                record: None,
                run_seed: 0,
                detail: "lowered circuit differs from the original matrices".into(),
            })
        }
    });
    TrialSummary::collect(results)
}

/// Correction statistics over single-gadget runs on random inputs.
#[derive(Clone, Copy, Debug)]
pub struct GadgetStats {
    /// Fraction of RX4 runs needing a correction.
    pub rx4_fraction: f64,
    /// Fraction of RZ4 runs needing a correction.
    pub rz4_fraction: f64,
    /// Mean corrections per RZ8 run (second stage counts one, its Pauli fix
    /// one more).
    pub rz8_mean: f64,
    pub samples: usize,
}

pub fn gadget_statistics(samples: usize, seed: u64, parallel: bool) -> GadgetStats {
    let kinds = ["RX4", "RZ4", "RZ8"];
    let totals: Vec<usize> = kinds
        .iter()
        .enumerate()
        .map(|(k, mnemonic)| {
            let text = format!("qubits 1\n{mnemonic} 0\n");
            let circuit = crate::circuit::parse_circuit(&text).expect("valid text");
            map_indexed(samples, parallel, |i| {
                let mut rng = trial_rng(seed ^ ((k as u64 + 1) << 32), i);
                let input = StateVector::random(1, &mut rng);
                let run = execute(&circuit, RunMode::Immediate, &input, rng.gen())
                    .expect("single-gadget run");
                run.applied_corrections
            })
            .into_iter()
            .sum()
        })
        .collect();
    GadgetStats {
        rx4_fraction: totals[0] as f64 / samples as f64,
        rz4_fraction: totals[1] as f64 / samples as f64,
        rz8_mean: totals[2] as f64 / samples as f64,
        samples,
    }
}
