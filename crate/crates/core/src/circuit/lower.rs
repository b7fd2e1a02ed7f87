//! Lowering from the universal set {CNOT, H, P, T} onto the teleportation
//! gate set. P and T are the Z-rotations themselves; H expands through the
//! palindromic product RZ4·RX4·RZ4.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, CircuitError, Gate, QubitId, RotationKind};

/// Single-qubit mnemonics accepted by the extended format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingleKind {
    Rx4,
    Rz4,
    Rz8,
    H,
    P,
    T,
}

impl SingleKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            SingleKind::Rx4 => "RX4",
            SingleKind::Rz4 => "RZ4",
            SingleKind::Rz8 => "RZ8",
            SingleKind::H => "H",
            SingleKind::P => "P",
            SingleKind::T => "T",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtGate {
    Cnot { control: QubitId, target: QubitId },
    Single { kind: SingleKind, qubit: QubitId },
}

/// Circuit over the extended gate set, the input of [`lower_clifford_t`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtCircuit {
    qubit_count: usize,
    gates: Vec<ExtGate>,
}

impl ExtCircuit {
    pub fn new(qubit_count: usize, gates: Vec<ExtGate>) -> Result<ExtCircuit, CircuitError> {
        if qubit_count == 0 {
            return Err(CircuitError::NoQubits);
        }
        for (index, gate) in gates.iter().enumerate() {
            match *gate {
                ExtGate::Cnot { control, target } => {
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
                ExtGate::Single { qubit, .. } => {
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
        Ok(ExtCircuit { qubit_count, gates })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[ExtGate] {
        &self.gates
    }
}

/// Rewrites an extended circuit onto {CNOT, RX4, RZ4, RZ8}, preserving gate
/// order. Output length is the input length plus two per H gate.
pub fn lower_clifford_t(circuit: &ExtCircuit) -> Circuit {
    let mut gates = Vec::with_capacity(circuit.gates.len());
    for gate in &circuit.gates {
        match *gate {
            ExtGate::Cnot { control, target } => gates.push(Gate::Cnot { control, target }),
            ExtGate::Single { kind, qubit } => match kind {
                SingleKind::Rx4 => gates.push(Gate::Rotation {
                    kind: RotationKind::Rx4,
                    qubit,
                }),
                SingleKind::Rz4 | SingleKind::P => gates.push(Gate::Rotation {
                    kind: RotationKind::Rz4,
                    qubit,
                }),
                SingleKind::Rz8 | SingleKind::T => gates.push(Gate::Rotation {
                    kind: RotationKind::Rz8,
                    qubit,
                }),
                SingleKind::H => {
                    gates.push(Gate::Rotation {
                        kind: RotationKind::Rz4,
                        qubit,
                    });
                    gates.push(Gate::Rotation {
                        kind: RotationKind::Rx4,
                        qubit,
                    });
                    gates.push(Gate::Rotation {
                        kind: RotationKind::Rz4,
                        qubit,
                    });
                }
            },
        }
    }
    Circuit::new(circuit.qubit_count, gates).expect("lowering preserves operand ranges")
}

/// Random {CNOT, H, P, T} circuit for the lowering equivalence suite.
/// Same generator contract as `random_circuit` (ChaCha8, kind then operands).
pub(crate) fn random_clifford_t_circuit(
    qubit_count: usize,
    gate_count: usize,
    seed: u64,
) -> ExtCircuit {
    assert!(qubit_count >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [SingleKind::H, SingleKind::P, SingleKind::T];
    let mut gates = Vec::with_capacity(gate_count);
    for _ in 0..gate_count {
        let pick = if qubit_count >= 2 {
            rng.gen_range(0..4)
        } else {
            rng.gen_range(1..4)
        };
        if pick == 0 {
            let control = rng.gen_range(0..qubit_count);
            let mut target = rng.gen_range(0..qubit_count - 1);
            if target >= control {
                target += 1;
            }
            gates.push(ExtGate::Cnot { control, target });
        } else {
            gates.push(ExtGate::Single {
                kind: kinds[pick - 1],
                qubit: rng.gen_range(0..qubit_count),
            });
        }
    }
    ExtCircuit::new(qubit_count, gates).expect("generated gates are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(kind: SingleKind, qubit: usize) -> ExtGate {
        ExtGate::Single { kind, qubit }
    }

    #[test]
    fn p_and_t_map_to_z_rotations() {
        let ext = ExtCircuit::new(1, vec![single(SingleKind::P, 0)]).unwrap();
        assert_eq!(
            lower_clifford_t(&ext).gates(),
            &[Gate::Rotation {
                kind: RotationKind::Rz4,
                qubit: 0
            }]
        );

        let ext = ExtCircuit::new(1, vec![single(SingleKind::T, 0)]).unwrap();
        assert_eq!(
            lower_clifford_t(&ext).gates(),
            &[Gate::Rotation {
                kind: RotationKind::Rz8,
                qubit: 0
            }]
        );
    }

    #[test]
    fn h_expands_to_the_three_gate_palindrome() {
        let ext = ExtCircuit::new(1, vec![single(SingleKind::H, 0)]).unwrap();
        let lowered = lower_clifford_t(&ext);
        assert_eq!(
            lowered.gates(),
            &[
                Gate::Rotation {
                    kind: RotationKind::Rz4,
                    qubit: 0
                },
                Gate::Rotation {
                    kind: RotationKind::Rx4,
                    qubit: 0
                },
                Gate::Rotation {
                    kind: RotationKind::Rz4,
                    qubit: 0
                },
            ]
        );
    }

    #[test]
    fn empty_input_lowers_to_empty_output() {
        let ext = ExtCircuit::new(3, vec![]).unwrap();
        assert!(lower_clifford_t(&ext).is_empty());
    }

    #[test]
    fn output_length_counts_two_extra_per_h() {
        let ext = random_clifford_t_circuit(4, 50, 9);
        let h_count = ext
            .gates()
            .iter()
            .filter(|g| {
                matches!(
                    g,
                    ExtGate::Single {
                        kind: SingleKind::H,
                        ..
                    }
                )
            })
            .count();
        let lowered = lower_clifford_t(&ext);
        assert_eq!(lowered.len(), 50 + 2 * h_count);
    }
}
