//! Gate-level circuit representation over the teleportation gate set
//! {CNOT, RX4, RZ4, RZ8}, plus the extended Clifford+T input set that lowers
//! onto it.

mod generate;
mod lower;
mod parse;

pub use generate::{random_circuit, GateWeights, GenerateError};
pub(crate) use lower::random_clifford_t_circuit;
pub use lower::{lower_clifford_t, ExtCircuit, ExtGate, SingleKind};
pub use parse::{
    parse_circuit, parse_ext_circuit, serialize_circuit, serialize_ext_circuit, ParseError,
    ParseErrorKind,
};

/// Logical qubit index, 0-based.
pub type QubitId = usize;

/// The three teleportation-implemented rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RotationKind {
    /// X-axis rotation (π/2 total angle), X-basis measurement gadget.
    Rx4,
    /// Z-axis rotation, the P gate.
    Rz4,
    /// Z-axis rotation, the T gate; two-stage gadget.
    Rz8,
}

impl RotationKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            RotationKind::Rx4 => "RX4",
            RotationKind::Rz4 => "RZ4",
            RotationKind::Rz8 => "RZ8",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Cnot { control: QubitId, target: QubitId },
    Rotation { kind: RotationKind, qubit: QubitId },
}

impl Gate {
    pub fn is_rotation(&self) -> bool {
        matches!(self, Gate::Rotation { .. })
    }
}

/// Validated circuit: qubit count plus gates in execution order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

/// Structural violations rejected by [`Circuit::new`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("circuit needs at least one qubit")]
    NoQubits,
    #[error("gate {index}: qubit {qubit} out of range for {qubit_count} qubits")]
    QubitOutOfRange {
        index: usize,
        qubit: QubitId,
        qubit_count: usize,
    },
    #[error("gate {index}: CNOT control equals target ({qubit})")]
    ControlEqualsTarget { index: usize, qubit: QubitId },
}

impl Circuit {
    pub fn new(qubit_count: usize, gates: Vec<Gate>) -> Result<Circuit, CircuitError> {
        if qubit_count == 0 {
            return Err(CircuitError::NoQubits);
        }
        for (index, gate) in gates.iter().enumerate() {
            match *gate {
                Gate::Cnot { control, target } => {
                    for qubit in [control, target] {
                        if qubit >= qubit_count {
                            return Err(CircuitError::QubitOutOfRange {
                                index,
                                qubit,
                                qubit_count,
                            });
                        }
                    }
                    if control == target {
                        return Err(CircuitError::ControlEqualsTarget {
                            index,
                            qubit: control,
                        });
                    }
                }
                Gate::Rotation { qubit, .. } => {
                    if qubit >= qubit_count {
                        return Err(CircuitError::QubitOutOfRange {
                            index,
                            qubit,
                            qubit_count,
                        });
                    }
                }
            }
        }
        Ok(Circuit { qubit_count, gates })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of rotational (teleportation) gates.
    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_rotation()).count()
    }

    /// Counts of single-stage rotations (RX4 + RZ4) and two-stage rotations
    /// (RZ8), in that order.
    pub fn rotation_counts_by_cost(&self) -> (usize, usize) {
        let mut m4 = 0;
        let mut m8 = 0;
        for gate in &self.gates {
            match gate {
                Gate::Rotation {
                    kind: RotationKind::Rx4 | RotationKind::Rz4,
                    ..
                } => m4 += 1,
                Gate::Rotation {
                    kind: RotationKind::Rz8,
                    ..
                } => m8 += 1,
                Gate::Cnot { .. } => {}
            }
        }
        (m4, m8)
    }
}
