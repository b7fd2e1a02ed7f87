//! Teleportation-protocol executor.
//!
//! Per rotational gate, one fresh qubit is injected, entangled with the data
//! qubit through a CNOT, and the data qubit is measured away; the logical
//! slot moves onto the fresh qubit. Gadget wiring:
//!
//! * RX4: inject the -1 Y-eigenstate, CNOT(data → ancilla), X-measure data.
//! * RZ4: inject the +1 Y-eigenstate, CNOT(ancilla → data), Z-measure data.
//! * RZ8: inject A, CNOT(ancilla → data), Z-measure data; when the
//!   (frame-adjusted) outcome reads 1, an RZ4 gadget runs as a second stage.
//!
//! In immediate mode every byproduct is corrected on the spot and the
//! output is frame-free. In deferred mode nothing is corrected: raw outcomes
//! are recorded, and an embedded streaming tracker supplies the live frame
//! that the RZ8 branch decision needs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::PauliStatus;
use crate::circuit::{Circuit, Gate, RotationKind};
use crate::tracker::{MeasurementRecord, Outcome, Submitted, TrackerSession};

use super::{Basis, Injection, Label, SimError, StateVector, MAX_CIRCUIT_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    /// Corrections applied right after each measurement.
    Immediate,
    /// No corrections; outcomes recorded for later tracking.
    Deferred,
}

/// Output of a protocol run.
#[derive(Clone, Debug)]
pub struct RunResult {
    /// State over the n logical slots, in slot order.
    pub final_state: StateVector,
    /// One entry per rotational gate, raw bits.
    pub record: MeasurementRecord,
    /// In-circuit correction events (0 in deferred mode). An RZ8 counts its
    /// second stage as one correction plus one more when the stage-two
    /// outcome demands a Pauli fix.
    pub applied_corrections: usize,
}

struct Executor<'a> {
    state: StateVector,
    slots: Vec<Label>,
    next_label: Label,
    rng: ChaCha8Rng,
    mode: RunMode,
    session: Option<TrackerSession<'a>>,
    record: Vec<Outcome>,
    corrections: usize,
}

impl<'a> Executor<'a> {
    fn fresh_label(&mut self) -> Label {
        let label = self.next_label;
        self.next_label += 1;
        label
    }

    fn apply_pauli_fix(&mut self, label: Label) -> Result<(), SimError> {
        self.state
            .apply_unitary1(label, &PauliStatus::XZ.matrix())?;
        self.corrections += 1;
        Ok(())
    }

    /// Advances the embedded tracker to this rotation (deferred mode only).
    fn sync_session(&mut self, gate_index: usize) -> Result<(), SimError> {
        if let Some(session) = &mut self.session {
            let pending = session
                .next_rotation()?
                .expect("executor and session walk the same circuit");
            debug_assert_eq!(pending.gate_index, gate_index);
        }
        Ok(())
    }

    fn run_rx4(&mut self, gate_index: usize, qubit: usize) -> Result<(), SimError> {
        self.sync_session(gate_index)?;
        let fresh = self.fresh_label();
        self.state.inject(fresh, Injection::YMinus)?;
        self.state.apply_cnot(self.slots[qubit], fresh)?;
        let bit = self
            .state
            .measure(self.slots[qubit], Basis::X, &mut self.rng)?;
        self.slots[qubit] = fresh;
        match self.mode {
            RunMode::Immediate => {
                if bit {
                    self.apply_pauli_fix(fresh)?;
                }
            }
            RunMode::Deferred => {
                let session = self.session.as_mut().expect("deferred mode has a session");
                session.submit_outcome(bit)?;
            }
        }
        self.record.push(Outcome::Rx4(bit));
        Ok(())
    }

    fn run_rz4(&mut self, gate_index: usize, qubit: usize) -> Result<(), SimError> {
        self.sync_session(gate_index)?;
        let bit = self.z_stage(qubit)?;
        match self.mode {
            RunMode::Immediate => {
                if bit {
                    self.apply_pauli_fix(self.slots[qubit])?;
                }
            }
            RunMode::Deferred => {
                let session = self.session.as_mut().expect("deferred mode has a session");
                session.submit_outcome(bit)?;
            }
        }
        self.record.push(Outcome::Rz4(bit));
        Ok(())
    }

    fn run_rz8(&mut self, gate_index: usize, qubit: usize) -> Result<(), SimError> {
        self.sync_session(gate_index)?;
        let fresh = self.fresh_label();
        self.state.inject(fresh, Injection::A)?;
        self.state.apply_cnot(fresh, self.slots[qubit])?;
        let first = self
            .state
            .measure(self.slots[qubit], Basis::Z, &mut self.rng)?;
        self.slots[qubit] = fresh;

        let second_stage = match self.mode {
            RunMode::Immediate => first,
            RunMode::Deferred => {
                let session = self.session.as_mut().expect("deferred mode has a session");
                session.submit_outcome(first)? == Submitted::SecondStagePending
            }
        };

        let mut second = None;
        if second_stage {
            if self.mode == RunMode::Immediate {
                // The corrective π/2 rotation is itself a correction event.
                self.corrections += 1;
            }
            let bit = self.z_stage(qubit)?;
            match self.mode {
                RunMode::Immediate => {
                    if !bit {
                        self.apply_pauli_fix(self.slots[qubit])?;
                    }
                }
                RunMode::Deferred => {
                    let session = self.session.as_mut().expect("deferred mode has a session");
                    session.submit_second(bit)?;
                }
            }
            second = Some(bit);
        }
        self.record.push(Outcome::Rz8 { first, second });
        Ok(())
    }

    /// One Z-rotation teleportation step: inject the +1 Y-eigenstate,
    /// CNOT(ancilla → data), Z-measure the data, move the slot.
    fn z_stage(&mut self, qubit: usize) -> Result<bool, SimError> {
        let fresh = self.fresh_label();
        self.state.inject(fresh, Injection::YPlus)?;
        self.state.apply_cnot(fresh, self.slots[qubit])?;
        let bit = self
            .state
            .measure(self.slots[qubit], Basis::Z, &mut self.rng)?;
        self.slots[qubit] = fresh;
        Ok(bit)
    }
}

/// Runs the teleportation protocol over the circuit.
pub fn execute(
    circuit: &Circuit,
    mode: RunMode,
    input: &StateVector,
    seed: u64,
) -> Result<RunResult, SimError> {
    if circuit.qubit_count() > MAX_CIRCUIT_QUBITS {
        return Err(SimError::Capacity);
    }
    if input.live_count() != circuit.qubit_count() {
        return Err(SimError::SlotMismatch {
            expected: circuit.qubit_count(),
            actual: input.live_count(),
        });
    }

    let slots: Vec<Label> = input.labels().to_vec();
    let next_label = slots.iter().copied().max().map_or(0, |m| m + 1);
    let mut executor = Executor {
        state: input.clone(),
        slots,
        next_label,
        rng: ChaCha8Rng::seed_from_u64(seed),
        mode,
        session: match mode {
            RunMode::Deferred => Some(TrackerSession::new(circuit)),
            RunMode::Immediate => None,
        },
        record: Vec::with_capacity(circuit.rotation_count()),
        corrections: 0,
    };

    for (gate_index, gate) in circuit.gates().iter().enumerate() {
        match *gate {
            Gate::Cnot { control, target } => {
                executor
                    .state
                    .apply_cnot(executor.slots[control], executor.slots[target])?;
            }
            Gate::Rotation { kind, qubit } => match kind {
                RotationKind::Rx4 => executor.run_rx4(gate_index, qubit)?,
                RotationKind::Rz4 => executor.run_rz4(gate_index, qubit)?,
                RotationKind::Rz8 => executor.run_rz8(gate_index, qubit)?,
            },
        }
    }

    let mut final_state = executor.state;
    final_state.reorder(&executor.slots)?;
    Ok(RunResult {
        final_state,
        record: MeasurementRecord::from_entries(executor.record),
        applied_corrections: executor.corrections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::sim::{equal_up_to_phase, ideal_apply};
    use rand::SeedableRng;

    const WORKED_EXAMPLE: &str = "qubits 2\nRX4 0\nCNOT 0 1\nRZ8 1\nCNOT 0 1\nRZ4 1\nRZ4 0\n";

    #[test]
    fn rz4_on_zero_is_a_fixed_point() {
        let circuit = parse_circuit("qubits 1\nRZ4 0\n").unwrap();
        let input = StateVector::zeros(1);
        for seed in 0..16 {
            let run = execute(&circuit, RunMode::Immediate, &input, seed).unwrap();
            assert!(equal_up_to_phase(&run.final_state, &input, 1e-9).unwrap());
        }
    }

    #[test]
    fn immediate_mode_matches_direct_application_on_the_worked_example() {
        let circuit = parse_circuit(WORKED_EXAMPLE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..100 {
            let input = StateVector::random(2, &mut rng);
            let run = execute(&circuit, RunMode::Immediate, &input, seed).unwrap();
            let ideal = ideal_apply(&circuit, &input).unwrap();
            assert!(
                equal_up_to_phase(&run.final_state, &ideal, 1e-9).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn deferred_mode_applies_no_corrections_and_records_every_rotation() {
        let circuit = parse_circuit(WORKED_EXAMPLE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let input = StateVector::random(2, &mut rng);
        let run = execute(&circuit, RunMode::Deferred, &input, 17).unwrap();
        assert_eq!(run.applied_corrections, 0);
        assert_eq!(run.record.len(), 4);
        assert_eq!(run.final_state.live_count(), 2);
    }

    #[test]
    fn empty_circuit_returns_the_input() {
        let circuit = parse_circuit("qubits 2\n").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let input = StateVector::random(2, &mut rng);
        let run = execute(&circuit, RunMode::Deferred, &input, 0).unwrap();
        assert!(run.record.is_empty());
        assert!(equal_up_to_phase(&run.final_state, &input, 1e-12).unwrap());
    }

    #[test]
    fn oversized_circuits_are_rejected() {
        let circuit = Circuit::new(
            20,
            vec![Gate::Rotation {
                kind: RotationKind::Rz4,
                qubit: 0,
            }],
        )
        .unwrap();
        let input = StateVector::zeros(2);
        assert_eq!(
            execute(&circuit, RunMode::Immediate, &input, 0).unwrap_err(),
            SimError::Capacity
        );
    }

    #[test]
    fn fixed_seed_reproduces_the_record() {
        let circuit = parse_circuit(WORKED_EXAMPLE).unwrap();
        let input = StateVector::zeros(2);
        let a = execute(&circuit, RunMode::Deferred, &input, 123).unwrap();
        let b = execute(&circuit, RunMode::Deferred, &input, 123).unwrap();
        assert_eq!(a.record, b.record);
        assert_eq!(a.applied_corrections, 0);
    }
}
