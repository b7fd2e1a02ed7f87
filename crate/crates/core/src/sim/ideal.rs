//! Direct matrix application: the reference every protocol run is compared
//! against.

use num_complex::Complex64;

use crate::algebra::Mat2;
use crate::circuit::{Circuit, ExtCircuit, ExtGate, Gate, RotationKind, SingleKind};

use super::{SimError, StateVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// (1/√2)[[1, -i], [-i, 1]]
pub fn rx4() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0))
}

/// diag(1, i), the P gate.
pub fn rz4() -> Mat2 {
    Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))
}

/// diag(1, e^{iπ/4}), the T gate; T² = P fixes the exponent.
pub fn rz8() -> Mat2 {
    Mat2::new(
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
    )
}

pub fn hadamard() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0))
}

pub fn gate_matrix(kind: RotationKind) -> Mat2 {
    match kind {
        RotationKind::Rx4 => rx4(),
        RotationKind::Rz4 => rz4(),
        RotationKind::Rz8 => rz8(),
    }
}

pub fn ext_gate_matrix(kind: SingleKind) -> Mat2 {
    match kind {
        SingleKind::Rx4 => rx4(),
        SingleKind::Rz4 | SingleKind::P => rz4(),
        SingleKind::Rz8 | SingleKind::T => rz8(),
        SingleKind::H => hadamard(),
    }
}

/// Multiplies the circuit's gate matrices into the input state, in gate
/// order. Qubit k acts on the k-th live slot of the input.
pub fn ideal_apply(circuit: &Circuit, input: &StateVector) -> Result<StateVector, SimError> {
    if input.live_count() != circuit.qubit_count() {
        return Err(SimError::SlotMismatch {
            expected: circuit.qubit_count(),
            actual: input.live_count(),
        });
    }
    let labels: Vec<_> = input.labels().to_vec();
    let mut state = input.clone();
    for gate in circuit.gates() {
        match *gate {
            Gate::Cnot { control, target } => {
                state.apply_cnot(labels[control], labels[target])?;
            }
            Gate::Rotation { kind, qubit } => {
                state.apply_unitary1(labels[qubit], &gate_matrix(kind))?;
            }
        }
    }
    Ok(state)
}

/// Same for the extended {CNOT, H, P, T} set.
pub fn ideal_apply_ext(circuit: &ExtCircuit, input: &StateVector) -> Result<StateVector, SimError> {
    if input.live_count() != circuit.qubit_count() {
        return Err(SimError::SlotMismatch {
            expected: circuit.qubit_count(),
            actual: input.live_count(),
        });
    }
    let labels: Vec<_> = input.labels().to_vec();
    let mut state = input.clone();
    for gate in circuit.gates() {
        match *gate {
            ExtGate::Cnot { control, target } => {
                state.apply_cnot(labels[control], labels[target])?;
            }
            ExtGate::Single { kind, qubit } => {
                state.apply_unitary1(labels[qubit], &ext_gate_matrix(kind))?;
            }
        }
    }
    Ok(state)
}
