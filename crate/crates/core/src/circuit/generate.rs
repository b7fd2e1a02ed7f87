//! Seeded random circuit generation.
//!
//! Reproducibility contract: the generator is ChaCha8 (`rand_chacha`),
//! seeded with the given 64-bit value. Per gate it draws one f64 in [0,1)
//! to select the kind against cumulative weights in the fixed order
//! CNOT, RX4, RZ4, RZ8, then uniform qubit indices (for CNOT the target is
//! drawn from the remaining n-1 indices). Identical seeds and parameters
//! give identical circuits on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, Gate, RotationKind};

/// Relative selection weights per gate kind. Need not be normalised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateWeights {
    pub cnot: f64,
    pub rx4: f64,
    pub rz4: f64,
    pub rz8: f64,
}

impl GateWeights {
    /// Equal weight for all four kinds.
    pub fn uniform() -> GateWeights {
        GateWeights {
            cnot: 1.0,
            rx4: 1.0,
            rz4: 1.0,
            rz8: 1.0,
        }
    }

    /// Rotations only, for single-qubit circuits.
    pub fn rotations_only() -> GateWeights {
        GateWeights {
            cnot: 0.0,
            ..GateWeights::uniform()
        }
    }

    fn total(&self) -> f64 {
        self.cnot + self.rx4 + self.rz4 + self.rz8
    }
}

impl Default for GateWeights {
    fn default() -> Self {
        GateWeights::uniform()
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("circuit needs at least one qubit")]
    NoQubits,
    #[error("weights must be nonnegative with a positive sum")]
    BadWeights,
    #[error("CNOT weight is positive but the circuit has only one qubit")]
    CnotNeedsTwoQubits,
}

/// Generates `gate_count` gates over `qubit_count` qubits, deterministically
/// for a fixed seed.
pub fn random_circuit(
    qubit_count: usize,
    gate_count: usize,
    seed: u64,
    weights: &GateWeights,
) -> Result<Circuit, GenerateError> {
    if qubit_count == 0 {
        return Err(GenerateError::NoQubits);
    }
    let parts = [weights.cnot, weights.rx4, weights.rz4, weights.rz8];
    if parts.iter().any(|w| *w < 0.0 || !w.is_finite()) || weights.total() <= 0.0 {
        return Err(GenerateError::BadWeights);
    }
    if weights.cnot > 0.0 && qubit_count < 2 {
        return Err(GenerateError::CnotNeedsTwoQubits);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = weights.total();
    let mut gates = Vec::with_capacity(gate_count);
    for _ in 0..gate_count {
        let draw = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = 3;
        for (i, w) in parts.iter().enumerate() {
            acc += w;
            if draw < acc {
                pick = i;
                break;
            }
        }
        let gate = match pick {
            0 => {
                let control = rng.gen_range(0..qubit_count);
                let mut target = rng.gen_range(0..qubit_count - 1);
                if target >= control {
                    target += 1;
                }
                Gate::Cnot { control, target }
            }
            1 => Gate::Rotation {
                kind: RotationKind::Rx4,
                qubit: rng.gen_range(0..qubit_count),
            },
            2 => Gate::Rotation {
                kind: RotationKind::Rz4,
                qubit: rng.gen_range(0..qubit_count),
            },
            _ => Gate::Rotation {
                kind: RotationKind::Rz8,
                qubit: rng.gen_range(0..qubit_count),
            },
        };
        gates.push(gate);
    }

    Ok(Circuit::new(qubit_count, gates).expect("generated gates are in range by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gates_gives_an_empty_circuit() {
        let c = random_circuit(2, 0, 1, &GateWeights::uniform()).unwrap();
        assert_eq!(c.qubit_count(), 2);
        assert!(c.is_empty());
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = random_circuit(7, 200, 42, &GateWeights::uniform()).unwrap();
        let b = random_circuit(7, 200, 42, &GateWeights::uniform()).unwrap();
        assert_eq!(a, b);
        let c = random_circuit(7, 200, 43, &GateWeights::uniform()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn operands_stay_in_range() {
        let c = random_circuit(100, 1000, 42, &GateWeights::uniform()).unwrap();
        assert_eq!(c.len(), 1000);
        for gate in c.gates() {
            match *gate {
                Gate::Cnot { control, target } => {
                    assert!(control < 100 && target < 100 && control != target);
                }
                Gate::Rotation { qubit, .. } => assert!(qubit < 100),
            }
        }
    }

    #[test]
    fn large_benchmark_shape_is_valid() {
        let c = random_circuit(5100, 50_000, 7, &GateWeights::uniform()).unwrap();
        assert_eq!(c.qubit_count(), 5100);
        assert_eq!(c.len(), 50_000);
    }

    #[test]
    fn single_qubit_with_cnot_weight_is_rejected() {
        let err = random_circuit(1, 5, 0, &GateWeights::uniform()).unwrap_err();
        assert_eq!(err, GenerateError::CnotNeedsTwoQubits);
        assert!(random_circuit(1, 5, 0, &GateWeights::rotations_only()).is_ok());
    }

    #[test]
    fn degenerate_weights_are_rejected() {
        let zero = GateWeights {
            cnot: 0.0,
            rx4: 0.0,
            rz4: 0.0,
            rz8: 0.0,
        };
        assert_eq!(
            random_circuit(2, 1, 0, &zero).unwrap_err(),
            GenerateError::BadWeights
        );
        let negative = GateWeights {
            rx4: -1.0,
            ..GateWeights::uniform()
        };
        assert_eq!(
            random_circuit(2, 1, 0, &negative).unwrap_err(),
            GenerateError::BadWeights
        );
    }
}
