//! Byproduct-correction tracking.
//!
//! Teleportation gadgets leave probabilistic Pauli byproducts behind. Instead
//! of correcting each one on the quantum side, the raw measurement outcomes
//! are recorded and the pending correction status of every logical qubit is
//! propagated classically through the circuit; only the final frame is ever
//! applied. Propagation is a single O(m + n) pass of constant-time lookups.
//!
//! Rules:
//!
//! * CNOT ([`tau_cnot`]): an X on the control copies onto the target, a Z on
//!   the target copies onto the control; nothing else moves.
//! * Rotations ([`tau_rotation`]): the data qubit is consumed by the gadget
//!   measurement. The pending component that anticommutes with the
//!   measurement basis flips the recorded outcome (Z for the X-basis RX4
//!   measurement, X for the Z-basis RZ4/RZ8 measurements); the commuting
//!   component survives onto the fresh qubit. The flip-adjusted outcome then
//!   selects the gadget's own byproduct.
//! * RZ8 runs its second teleportation stage exactly when the flip-adjusted
//!   first outcome is 1 ([`needs_second_stage`]); the stage-two measurement
//!   is entered with an X component always pending.
//!
//! The rotation tables below are certified against the state-vector gadget
//! oracle (`sim::derive_tau_rotation_table`) bit for bit; the oracle also
//! emits a diff against the published reference table, which misprints a
//! handful of entries.

mod record;

pub use record::{synthesize_record, MeasurementRecord, Outcome, RecordError};

use crate::algebra::PauliStatus;
use crate::circuit::{Circuit, Gate, RotationKind};

/// Per-qubit pending corrections; the output of a tracking run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionFrame {
    statuses: Vec<PauliStatus>,
}

impl CorrectionFrame {
    pub fn identity(qubit_count: usize) -> CorrectionFrame {
        CorrectionFrame {
            statuses: vec![PauliStatus::I; qubit_count],
        }
    }

    pub fn statuses(&self) -> &[PauliStatus] {
        &self.statuses
    }

    pub fn len(&self) -> usize {
        self.statuses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statuses.is_empty()
    }

    /// Number of qubits whose status is not I, i.e. corrections still owed.
    pub fn correction_count(&self) -> usize {
        self.statuses
            .iter()
            .filter(|s| **s != PauliStatus::I)
            .count()
    }

    /// One `<index> <status>` line per qubit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (index, status) in self.statuses.iter().enumerate() {
            out.push_str(&format!("{index} {status}\n"));
        }
        out
    }
}

/// Tracking failures: records inconsistent with the circuit or misuse of a
/// streaming session.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TrackError {
    #[error("record has {actual} entries but the circuit has {expected} rotational gates")]
    RecordLength { expected: usize, actual: usize },
    #[error("gate {gate_index}: outcome shape does not match a {kind} gate")]
    OutcomeShape {
        gate_index: usize,
        kind: &'static str,
    },
    #[error(
        "gate {gate_index}: second-stage outcome present={found} but the frame-adjusted \
         first outcome requires={required}"
    )]
    SecondStageMismatch {
        gate_index: usize,
        required: bool,
        found: bool,
    },
    #[error("outcome shape does not match a {kind} gate")]
    MalformedOutcome { kind: &'static str },
    #[error("streaming session: {0}")]
    SessionOrder(&'static str),
    #[error("session finished but the rotational gate at index {gate_index} has no outcome")]
    SessionIncomplete { gate_index: usize },
}

/// Propagates a status pair through a CNOT: the control status gains Z when
/// the target carries a Z component, the target status gains X when the
/// control carries an X component.
#[inline]
pub fn tau_cnot(control: PauliStatus, target: PauliStatus) -> (PauliStatus, PauliStatus) {
    let control_out = if target.z_flag() {
        control.flip_z()
    } else {
        control
    };
    let target_out = if control.x_flag() {
        target.flip_x()
    } else {
        target
    };
    (control_out, target_out)
}

/// True when the RZ8 second teleportation stage must run: the first
/// outcome, flipped by the X component of the incoming status, reads 1.
#[inline]
pub fn needs_second_stage(s_in: PauliStatus, first_bit: bool) -> bool {
    first_bit ^ s_in.x_flag()
}

// Rotation tables, indexed by [s_in.bits()][outcome bit]. Derived from the
// gadget algebra and certified by the oracle.

const Q_I: PauliStatus = PauliStatus::I;
const Q_X: PauliStatus = PauliStatus::X;
const Q_Z: PauliStatus = PauliStatus::Z;
const Q_XZ: PauliStatus = PauliStatus::XZ;

/// RX4 gadget, indexed by the flip-adjusted outcome (raw bit XOR the Z flag
/// of the input): clean on adjusted |+⟩, XZ on adjusted |-⟩, with the X
/// component of the input passing through. The Z component is consumed by
/// the X-basis measurement, so rows depend only on the X flag.
pub(crate) const RX4_TABLE: [[PauliStatus; 2]; 4] = [
    [Q_I, Q_XZ], // s_in = I
    [Q_X, Q_Z],  // s_in = X
    [Q_I, Q_XZ], // s_in = Z
    [Q_X, Q_Z],  // s_in = XZ
];

/// RZ4 gadget, indexed by the flip-adjusted outcome (raw bit XOR the X flag
/// of the input): clean on adjusted |0⟩, XZ on adjusted |1⟩, with the Z
/// component of the input passing through.
pub(crate) const RZ4_TABLE: [[PauliStatus; 2]; 4] = [
    [Q_I, Q_XZ], // s_in = I
    [Q_I, Q_XZ], // s_in = X
    [Q_Z, Q_X],  // s_in = Z
    [Q_Z, Q_X],  // s_in = XZ
];

/// RZ8, second stage skipped: only the Z component of the input survives.
pub(crate) const RZ8_SKIP_TABLE: [PauliStatus; 4] = [Q_I, Q_I, Q_Z, Q_Z];

/// RZ8, second stage taken, indexed by the raw second outcome bit. The
/// stage-two measurement always sees a pending X from stage one, so the
/// clean branch is the raw 1 outcome; only the Z component of the input
/// survives into these values.
pub(crate) const RZ8_SECOND_TABLE: [[PauliStatus; 2]; 4] = [
    [Q_XZ, Q_I], // s_in = I
    [Q_XZ, Q_I], // s_in = X
    [Q_X, Q_Z],  // s_in = Z
    [Q_X, Q_Z],  // s_in = XZ
];

/// The shipped rotation rules as one value, for certification against the
/// oracle-derived table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationTable {
    pub rx4: [[PauliStatus; 2]; 4],
    pub rz4: [[PauliStatus; 2]; 4],
    pub rz8_skip: [PauliStatus; 4],
    pub rz8_second: [[PauliStatus; 2]; 4],
}

pub fn rotation_table() -> RotationTable {
    RotationTable {
        rx4: RX4_TABLE,
        rz4: RZ4_TABLE,
        rz8_skip: RZ8_SKIP_TABLE,
        rz8_second: RZ8_SECOND_TABLE,
    }
}

/// Propagates a status through one rotational gate given its recorded
/// outcome. Rejects outcomes whose shape does not fit the gate, including an
/// RZ8 second bit that contradicts [`needs_second_stage`].
pub fn tau_rotation(
    kind: RotationKind,
    s_in: PauliStatus,
    outcome: &Outcome,
) -> Result<PauliStatus, TrackError> {
    let s = s_in.bits() as usize;
    match (kind, outcome) {
        (RotationKind::Rx4, Outcome::Rx4(bit)) => Ok(RX4_TABLE[s][(*bit ^ s_in.z_flag()) as usize]),
        (RotationKind::Rz4, Outcome::Rz4(bit)) => Ok(RZ4_TABLE[s][(*bit ^ s_in.x_flag()) as usize]),
        (RotationKind::Rz8, Outcome::Rz8 { first, second }) => {
            let required = needs_second_stage(s_in, *first);
            match (required, second) {
                (false, None) => Ok(RZ8_SKIP_TABLE[s]),
                (true, Some(bit)) => Ok(RZ8_SECOND_TABLE[s][*bit as usize]),
                _ => Err(TrackError::MalformedOutcome { kind: "RZ8" }),
            }
        }
        (kind, _) => Err(TrackError::MalformedOutcome {
            kind: kind.mnemonic(),
        }),
    }
}

// Table indexing above: RX4/RZ4 rows are written so that the flip-adjusted
// bit picks the column, which makes each row the base row composed with the
// surviving component of s_in. tau_rotation and the session agree on this.

/// Expected number of in-circuit corrections were every outcome corrected
/// immediately: 0.5 per single-stage rotation, 0.75 per RZ8.
pub fn expected_correction_count(circuit: &Circuit) -> f64 {
    let (m4, m8) = circuit.rotation_counts_by_cost();
    0.5 * m4 as f64 + 0.75 * m8 as f64
}

/// A rotational gate waiting for its measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PendingRotation {
    pub gate_index: usize,
    pub kind: RotationKind,
    pub qubit: usize,
}

/// Result of submitting a first outcome bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Submitted {
    /// The gate is fully processed.
    Complete,
    /// RZ8 only: the second teleportation stage must run and its outcome
    /// must be submitted next.
    SecondStagePending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Scan,
    AwaitOutcome { gate_index: usize },
    AwaitSecond { gate_index: usize },
}

/// Streaming tracker: consumes outcomes gate by gate while the circuit is
/// executing, which is what decides the RZ8 branch live. Single-owner
/// mutable; independent sessions run concurrently without restriction.
#[derive(Clone, Debug)]
pub struct TrackerSession<'a> {
    circuit: &'a Circuit,
    frame: Vec<PauliStatus>,
    cursor: usize,
    phase: Phase,
}

impl<'a> TrackerSession<'a> {
    pub fn new(circuit: &'a Circuit) -> TrackerSession<'a> {
        TrackerSession {
            circuit,
            frame: vec![PauliStatus::I; circuit.qubit_count()],
            cursor: 0,
            phase: Phase::Scan,
        }
    }

    /// Current frame; mid-circuit inspection is allowed.
    pub fn frame(&self) -> &[PauliStatus] {
        &self.frame
    }

    /// Advances through CNOT gates to the next rotational gate, or to the
    /// end of the circuit (returning None).
    pub fn next_rotation(&mut self) -> Result<Option<PendingRotation>, TrackError> {
        if self.phase != Phase::Scan {
            return Err(TrackError::SessionOrder(
                "next_rotation called while an outcome is pending",
            ));
        }
        while let Some(gate) = self.circuit.gates().get(self.cursor) {
            match *gate {
                Gate::Cnot { control, target } => {
                    let (c, t) = tau_cnot(self.frame[control], self.frame[target]);
                    self.frame[control] = c;
                    self.frame[target] = t;
                    self.cursor += 1;
                }
                Gate::Rotation { kind, qubit } => {
                    self.phase = Phase::AwaitOutcome {
                        gate_index: self.cursor,
                    };
                    return Ok(Some(PendingRotation {
                        gate_index: self.cursor,
                        kind,
                        qubit,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Submits the (first) raw measurement bit of the pending rotation.
    pub fn submit_outcome(&mut self, bit: bool) -> Result<Submitted, TrackError> {
        let Phase::AwaitOutcome { gate_index } = self.phase else {
            return Err(TrackError::SessionOrder(
                "submit_outcome without a pending rotation",
            ));
        };
        let Gate::Rotation { kind, qubit } = self.circuit.gates()[gate_index] else {
            unreachable!("pending gate is rotational");
        };
        let s_in = self.frame[qubit];
        let s = s_in.bits() as usize;
        match kind {
            RotationKind::Rx4 => {
                self.frame[qubit] = RX4_TABLE[s][(bit ^ s_in.z_flag()) as usize];
            }
            RotationKind::Rz4 => {
                self.frame[qubit] = RZ4_TABLE[s][(bit ^ s_in.x_flag()) as usize];
            }
            RotationKind::Rz8 => {
                if needs_second_stage(s_in, bit) {
                    self.phase = Phase::AwaitSecond { gate_index };
                    return Ok(Submitted::SecondStagePending);
                }
                self.frame[qubit] = RZ8_SKIP_TABLE[s];
            }
        }
        self.cursor += 1;
        self.phase = Phase::Scan;
        Ok(Submitted::Complete)
    }

    /// True when an RZ8 first bit has been submitted and the second stage
    /// must run.
    pub fn second_stage_pending(&self) -> bool {
        matches!(self.phase, Phase::AwaitSecond { .. })
    }

    /// Submits the RZ8 second-stage measurement bit.
    pub fn submit_second(&mut self, bit: bool) -> Result<(), TrackError> {
        let Phase::AwaitSecond { gate_index } = self.phase else {
            return Err(TrackError::SessionOrder(
                "submit_second without a pending second stage",
            ));
        };
        let Gate::Rotation { qubit, .. } = self.circuit.gates()[gate_index] else {
            unreachable!("pending gate is rotational");
        };
        let s = self.frame[qubit].bits() as usize;
        self.frame[qubit] = RZ8_SECOND_TABLE[s][bit as usize];
        self.cursor += 1;
        self.phase = Phase::Scan;
        Ok(())
    }

    /// Processes any trailing CNOTs and returns the final frame. Fails if a
    /// rotational gate never received its outcome.
    pub fn finish(mut self) -> Result<CorrectionFrame, TrackError> {
        if self.phase != Phase::Scan {
            return Err(TrackError::SessionOrder(
                "finish called while an outcome is pending",
            ));
        }
        match self.next_rotation()? {
            None => Ok(CorrectionFrame {
                statuses: self.frame,
            }),
            Some(pending) => Err(TrackError::SessionIncomplete {
                gate_index: pending.gate_index,
            }),
        }
    }
}

/// Post-hoc tracking: scans the circuit once against a complete record and
/// returns the output frame. The record's RZ8 branch structure must match
/// what the streaming rule decides as the frame evolves.
pub fn track(circuit: &Circuit, record: &MeasurementRecord) -> Result<CorrectionFrame, TrackError> {
    let expected = circuit.rotation_count();
    if record.len() != expected {
        return Err(TrackError::RecordLength {
            expected,
            actual: record.len(),
        });
    }

    let mut session = TrackerSession::new(circuit);
    let mut entries = record.entries().iter();
    while let Some(pending) = session.next_rotation()? {
        let entry = entries.next().expect("record length checked above");
        match (pending.kind, entry) {
            (RotationKind::Rx4, Outcome::Rx4(bit)) | (RotationKind::Rz4, Outcome::Rz4(bit)) => {
                session.submit_outcome(*bit)?;
            }
            (RotationKind::Rz8, Outcome::Rz8 { first, second }) => {
                let submitted = session.submit_outcome(*first)?;
                let required = submitted == Submitted::SecondStagePending;
                match (required, second) {
                    (true, Some(bit)) => session.submit_second(*bit)?,
                    (false, None) => {}
                    (required, second) => {
                        return Err(TrackError::SecondStageMismatch {
                            gate_index: pending.gate_index,
                            required,
                            found: second.is_some(),
                        });
                    }
                }
            }
            (kind, _) => {
                return Err(TrackError::OutcomeShape {
                    gate_index: pending.gate_index,
                    kind: kind.mnemonic(),
                });
            }
        }
    }
    session.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use PauliStatus::{I, X, XZ, Z};

    const WORKED_EXAMPLE: &str = "qubits 2\nRX4 0\nCNOT 0 1\nRZ8 1\nCNOT 0 1\nRZ4 1\nRZ4 0\n";

    fn worked_example_record() -> MeasurementRecord {
        MeasurementRecord::from_entries(vec![
            Outcome::Rx4(false),
            Outcome::Rz8 {
                first: true,
                second: Some(false),
            },
            Outcome::Rz4(false),
            Outcome::Rz4(true),
        ])
    }

    #[test]
    fn tau_cnot_matches_the_propagation_equations() {
        assert_eq!(tau_cnot(X, I), (X, X));
        assert_eq!(tau_cnot(I, I), (I, I));
        assert_eq!(tau_cnot(I, Z), (Z, Z));
        assert_eq!(tau_cnot(X, Z), (XZ, XZ));
    }

    #[test]
    fn tau_cnot_is_a_bijection_on_status_pairs() {
        use std::collections::BTreeSet;
        let outputs: BTreeSet<_> = PauliStatus::ALL
            .iter()
            .flat_map(|c| PauliStatus::ALL.iter().map(|t| tau_cnot(*c, *t)))
            .collect();
        assert_eq!(outputs.len(), 16);
    }

    #[test]
    fn second_stage_rule_follows_the_adjusted_bit() {
        assert!(!needs_second_stage(I, false));
        assert!(needs_second_stage(I, true));
        assert!(!needs_second_stage(X, true));
        assert!(needs_second_stage(X, false));
        assert!(needs_second_stage(Z, true));
        assert!(!needs_second_stage(XZ, true));
    }

    #[test]
    fn tau_rotation_table_entries() {
        assert_eq!(
            tau_rotation(RotationKind::Rx4, I, &Outcome::Rx4(false)).unwrap(),
            I
        );
        assert_eq!(
            tau_rotation(RotationKind::Rz4, Z, &Outcome::Rz4(true)).unwrap(),
            X
        );
        assert_eq!(
            tau_rotation(
                RotationKind::Rz8,
                I,
                &Outcome::Rz8 {
                    first: true,
                    second: Some(false)
                }
            )
            .unwrap(),
            XZ
        );
        assert_eq!(
            tau_rotation(RotationKind::Rz4, XZ, &Outcome::Rz4(true)).unwrap(),
            Z
        );
    }

    #[test]
    fn tau_rotation_rejects_malformed_outcomes() {
        assert!(tau_rotation(RotationKind::Rx4, I, &Outcome::Rz4(false)).is_err());
        // Second bit present although the adjusted first bit skips stage two.
        assert!(tau_rotation(
            RotationKind::Rz8,
            I,
            &Outcome::Rz8 {
                first: false,
                second: Some(true)
            }
        )
        .is_err());
        // Second bit missing although stage two must run.
        assert!(tau_rotation(
            RotationKind::Rz8,
            I,
            &Outcome::Rz8 {
                first: true,
                second: None
            }
        )
        .is_err());
    }

    #[test]
    fn worked_example_produces_x_corrections_on_both_outputs() {
        let circuit = parse_circuit(WORKED_EXAMPLE).unwrap();
        let frame = track(&circuit, &worked_example_record()).unwrap();
        assert_eq!(frame.statuses(), &[X, X]);
        assert_eq!(frame.to_text(), "0 X\n1 X\n");
    }

    #[test]
    fn worked_example_intermediate_frames() {
        let circuit = parse_circuit(WORKED_EXAMPLE).unwrap();
        let mut session = TrackerSession::new(&circuit);
        let expected: [(usize, [PauliStatus; 2]); 4] =
            [(0, [I, I]), (2, [I, XZ]), (4, [Z, X]), (5, [X, X])];
        let record = worked_example_record();
        let mut entry = record.entries().iter();
        let mut checks = expected.iter();
        while let Some(pending) = session.next_rotation().unwrap() {
            match entry.next().unwrap() {
                Outcome::Rx4(bit) | Outcome::Rz4(bit) => {
                    session.submit_outcome(*bit).unwrap();
                }
                Outcome::Rz8 { first, second } => {
                    if session.submit_outcome(*first).unwrap() == Submitted::SecondStagePending {
                        session.submit_second(second.unwrap()).unwrap();
                    }
                }
            }
            let (index, frame) = checks.next().unwrap();
            assert_eq!(pending.gate_index, *index);
            assert_eq!(session.frame(), frame, "after gate index {index}");
        }
        // CNOT at index 3 turned (I, XZ) into (Z, XZ) before gate 4 ran.
        assert_eq!(session.finish().unwrap().statuses(), &[X, X]);
    }

    #[test]
    fn all_trivial_outcomes_leave_the_identity_frame() {
        let circuit = parse_circuit("qubits 3\nRX4 0\nRZ4 1\nRZ8 2\nCNOT 0 2\nRZ4 0\n").unwrap();
        let record = MeasurementRecord::from_entries(vec![
            Outcome::Rx4(false),
            Outcome::Rz4(false),
            Outcome::Rz8 {
                first: false,
                second: None,
            },
            Outcome::Rz4(false),
        ]);
        let frame = track(&circuit, &record).unwrap();
        assert_eq!(frame.correction_count(), 0);
    }

    #[test]
    fn record_length_mismatch_is_reported() {
        let circuit = parse_circuit(WORKED_EXAMPLE).unwrap();
        let record = MeasurementRecord::from_entries(vec![Outcome::Rx4(false)]);
        assert_eq!(
            track(&circuit, &record).unwrap_err(),
            TrackError::RecordLength {
                expected: 4,
                actual: 1
            }
        );
    }

    #[test]
    fn outcome_shape_mismatch_names_the_gate() {
        let circuit = parse_circuit("qubits 1\nRX4 0\n").unwrap();
        let record = MeasurementRecord::from_entries(vec![Outcome::Rz4(false)]);
        assert_eq!(
            track(&circuit, &record).unwrap_err(),
            TrackError::OutcomeShape {
                gate_index: 0,
                kind: "RX4"
            }
        );
    }

    #[test]
    fn inconsistent_second_stage_flag_names_the_gate() {
        let circuit = parse_circuit("qubits 1\nRZ8 0\n").unwrap();
        let missing = MeasurementRecord::from_entries(vec![Outcome::Rz8 {
            first: true,
            second: None,
        }]);
        assert_eq!(
            track(&circuit, &missing).unwrap_err(),
            TrackError::SecondStageMismatch {
                gate_index: 0,
                required: true,
                found: false
            }
        );

        let spurious = MeasurementRecord::from_entries(vec![Outcome::Rz8 {
            first: false,
            second: Some(false),
        }]);
        assert_eq!(
            track(&circuit, &spurious).unwrap_err(),
            TrackError::SecondStageMismatch {
                gate_index: 0,
                required: false,
                found: true
            }
        );
    }

    #[test]
    fn session_misuse_is_rejected() {
        let circuit = parse_circuit("qubits 1\nRZ4 0\n").unwrap();
        let mut session = TrackerSession::new(&circuit);
        assert!(session.submit_outcome(false).is_err());

        session.next_rotation().unwrap().unwrap();
        assert!(session.next_rotation().is_err());
        assert!(session.clone().finish().is_err());

        session.submit_outcome(true).unwrap();
        assert!(session.submit_second(false).is_err());
        assert_eq!(session.finish().unwrap().statuses(), &[XZ]);
    }

    #[test]
    fn finish_processes_trailing_cnots() {
        let circuit = parse_circuit("qubits 2\nRZ4 0\nCNOT 0 1\n").unwrap();
        let mut session = TrackerSession::new(&circuit);
        session.next_rotation().unwrap().unwrap();
        session.submit_outcome(true).unwrap();
        let frame = session.finish().unwrap();
        // XZ on the control propagates an X onto the target.
        assert_eq!(frame.statuses(), &[XZ, X]);
    }

    #[test]
    fn empty_circuit_finishes_immediately() {
        let circuit = parse_circuit("qubits 4\n").unwrap();
        let session = TrackerSession::new(&circuit);
        let frame = session.finish().unwrap();
        assert_eq!(frame.statuses(), &[I; 4]);
    }

    #[test]
    fn expected_corrections_formula() {
        let four_rz4 = parse_circuit("qubits 1\nRZ4 0\nRZ4 0\nRZ4 0\nRZ4 0\n").unwrap();
        assert_eq!(expected_correction_count(&four_rz4), 2.0);

        let four_rz8 = parse_circuit("qubits 1\nRZ8 0\nRZ8 0\nRZ8 0\nRZ8 0\n").unwrap();
        assert_eq!(expected_correction_count(&four_rz8), 3.0);

        let example = parse_circuit(WORKED_EXAMPLE).unwrap();
        assert_eq!(expected_correction_count(&example), 2.25);
    }
}
