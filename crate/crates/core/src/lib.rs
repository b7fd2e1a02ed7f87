//! Classical tracking of teleportation byproduct corrections.
//!
//! Teleportation-based circuits implement their rotational gates through
//! state injection, CNOT and measurement; every such gadget leaves a random
//! Pauli correction behind. This crate propagates those corrections
//! classically in a single O(m + n) pass over the circuit, so that the
//! quantum side never stops for a fix-up, and pairs the tracker with a small
//! dense state-vector simulator that executes the protocol, provides the
//! direct-matrix reference, and brute-force certifies every propagation
//! rule.
//!
//! Modules:
//!
//! * [`algebra`]: the four-element correction-status group and its matrices.
//! * [`circuit`]: gate IR, text format, random generation, Clifford+T
//!   lowering.
//! * [`tracker`]: propagation rules, post-hoc and streaming tracking.
//! * [`sim`]: state-vector executor, direct application, the rule oracle.
//! * [`verify`]: randomized end-to-end equivalence suites.

pub mod algebra;
pub mod circuit;
mod par;
pub mod sim;
pub mod tracker;
pub mod verify;

pub use algebra::{Mat2, PauliStatus};
pub use circuit::{Circuit, Gate, GateWeights, RotationKind};
pub use tracker::{track, CorrectionFrame, MeasurementRecord, Outcome, TrackerSession};
