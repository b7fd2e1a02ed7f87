//! Dense state-vector simulator.
//!
//! Executes the teleportation protocol at desk scale, provides the direct
//! matrix reference, and hosts the brute-force oracle that certifies every
//! propagation rule. Qubits are addressed by label; measured qubits are
//! removed from the vector, so a protocol run never holds more than one
//! qubit beyond the circuit width.

mod exec;
mod ideal;
mod oracle;

pub use exec::{execute, RunMode, RunResult};
pub use ideal::{ext_gate_matrix, gate_matrix, ideal_apply, ideal_apply_ext};
pub use oracle::{
    cnot_commutation_identity_holds, derive_tau_cnot_table, derive_tau_rotation_table,
    diff_to_text, published_rotation_rows, rotation_rows, CnotTable, OracleError, TableRow,
    TauDiff,
};

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::Mat2;

/// Qubit label: stable identity across injections and removals.
pub type Label = u32;

/// Hard cap on simultaneously live qubits (amplitude vectors stay ≤ 2^15).
pub const MAX_LIVE_QUBITS: usize = 15;

/// Largest circuit width `execute` accepts; gadgets need one extra live
/// qubit.
pub const MAX_CIRCUIT_QUBITS: usize = MAX_LIVE_QUBITS - 1;

/// Resource states consumed by the teleportation gadgets.
///
/// The two Y-basis eigenstates serve different gadgets: the Z-rotation
/// gadget consumes the +1 eigenstate, the X-rotation gadget the -1
/// eigenstate (the one whose clean branch is the |+⟩ outcome).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Injection {
    /// (|0⟩ + i|1⟩)/√2
    YPlus,
    /// (|0⟩ - i|1⟩)/√2
    YMinus,
    /// (|0⟩ + e^{iπ/4}|1⟩)/√2
    A,
}

impl Injection {
    pub fn amplitudes(self) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Injection::YPlus => [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
            Injection::YMinus => [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
            Injection::A => {
                let phase = Complex64::from_polar(s, std::f64::consts::FRAC_PI_4);
                [Complex64::new(s, 0.0), phase]
            }
        }
    }
}

/// Measurement basis. Bit encoding: 0 ↦ |0⟩ / |+⟩, 1 ↦ |1⟩ / |-⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("label {0} is already live")]
    DuplicateLabel(Label),
    #[error("label {0} is not live")]
    DeadLabel(Label),
    #[error("control and target are the same label ({0})")]
    SameLabel(Label),
    #[error("matrix is not unitary within 1e-12")]
    NotUnitary,
    #[error("live qubit limit of {MAX_LIVE_QUBITS} exceeded")]
    Capacity,
    #[error("state has {actual} live qubits, expected {expected}")]
    SlotMismatch { expected: usize, actual: usize },
    #[error("states have different dimensions ({left} vs {right} qubits)")]
    DimensionMismatch { left: usize, right: usize },
    #[error("requested measurement branch has probability {probability:.3e}")]
    UnreachableBranch { probability: f64 },
    #[error("reorder list does not match the live labels")]
    BadReorder,
    #[error(transparent)]
    Tracking(#[from] crate::tracker::TrackError),
}

/// Labelled dense amplitude vector. Position p in `labels` owns bit
/// (count-1-p) of the amplitude index, so `labels[0]` is the most
/// significant bit.
#[derive(Clone, Debug)]
pub struct StateVector {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Zero-qubit state (a single unit amplitude), ready for injections.
    pub fn empty() -> StateVector {
        StateVector {
            labels: Vec::new(),
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// |0...0⟩ over labels 0..n.
    pub fn zeros(qubit_count: usize) -> StateVector {
        assert!(qubit_count <= MAX_LIVE_QUBITS, "too many qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector {
            labels: (0..qubit_count as Label).collect(),
            amps,
        }
    }

    /// Normalised state from explicit amplitudes over labels 0..n.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector, SimError> {
        let len = amps.len();
        assert!(len.is_power_of_two() && len > 0, "length must be 2^n");
        let qubit_count = len.trailing_zeros() as usize;
        if qubit_count > MAX_LIVE_QUBITS {
            return Err(SimError::Capacity);
        }
        let mut state = StateVector {
            labels: (0..qubit_count as Label).collect(),
            amps,
        };
        let norm = state.norm_sqr().sqrt();
        assert!(norm > 0.0, "zero vector is not a state");
        let inv = Complex64::new(1.0 / norm, 0.0);
        for a in &mut state.amps {
            *a *= inv;
        }
        Ok(state)
    }

    /// Pseudo-random state over labels 0..n: complex Gaussian amplitudes,
    /// normalised.
    pub fn random(qubit_count: usize, rng: &mut impl Rng) -> StateVector {
        let mut amps = Vec::with_capacity(1 << qubit_count);
        for _ in 0..(1 << qubit_count) {
            amps.push(Complex64::new(gaussian(rng), gaussian(rng)));
        }
        StateVector::from_amplitudes(amps).expect("gaussian draw is nonzero")
    }

    /// [`StateVector::random`] with its own ChaCha8 stream.
    pub fn seeded_random(qubit_count: usize, seed: u64) -> StateVector {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        StateVector::random(qubit_count, &mut rng)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn live_count(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn position(&self, label: Label) -> Result<usize, SimError> {
        self.labels
            .iter()
            .position(|l| *l == label)
            .ok_or(SimError::DeadLabel(label))
    }

    fn bit_for_position(&self, position: usize) -> usize {
        self.labels.len() - 1 - position
    }

    /// Tensor-extends with a fresh qubit in the given resource state. The
    /// new label becomes the least significant index bit.
    pub fn inject(&mut self, label: Label, which: Injection) -> Result<(), SimError> {
        if self.labels.contains(&label) {
            return Err(SimError::DuplicateLabel(label));
        }
        if self.labels.len() >= MAX_LIVE_QUBITS {
            return Err(SimError::Capacity);
        }
        let anc = which.amplitudes();
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        for a in &self.amps {
            amps.push(a * anc[0]);
            amps.push(a * anc[1]);
        }
        self.amps = amps;
        self.labels.push(label);
        Ok(())
    }

    /// Applies a single-qubit unitary to the labelled qubit.
    pub fn apply_unitary1(&mut self, label: Label, u: &Mat2) -> Result<(), SimError> {
        if !u.is_unitary(1e-12) {
            return Err(SimError::NotUnitary);
        }
        let bit = self.bit_for_position(self.position(label)?);
        let mask = 1usize << bit;
        for base in 0..self.amps.len() {
            if base & mask == 0 {
                let a0 = self.amps[base];
                let a1 = self.amps[base | mask];
                self.amps[base] = u.0[0][0] * a0 + u.0[0][1] * a1;
                self.amps[base | mask] = u.0[1][0] * a0 + u.0[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies CNOT between two live labels.
    pub fn apply_cnot(&mut self, control: Label, target: Label) -> Result<(), SimError> {
        if control == target {
            return Err(SimError::SameLabel(control));
        }
        let cmask = 1usize << self.bit_for_position(self.position(control)?);
        let tmask = 1usize << self.bit_for_position(self.position(target)?);
        for idx in 0..self.amps.len() {
            if idx & cmask != 0 && idx & tmask == 0 {
                self.amps.swap(idx, idx | tmask);
            }
        }
        Ok(())
    }

    /// Measures the labelled qubit (Born sampling), collapses, renormalises
    /// and removes it from the live set. Returns the outcome bit.
    pub fn measure(
        &mut self,
        label: Label,
        basis: Basis,
        rng: &mut impl Rng,
    ) -> Result<bool, SimError> {
        let position = self.position(label)?;
        let (p0, _) = self.branch_weights(position, basis);
        let outcome = rng.gen::<f64>() >= p0;
        self.collapse_remove(position, basis, outcome);
        Ok(outcome)
    }

    /// Forces a measurement branch (post-selection), collapses, renormalises
    /// and removes the qubit. Returns the branch probability; a branch with
    /// vanishing probability is an error.
    pub fn project(&mut self, label: Label, basis: Basis, outcome: bool) -> Result<f64, SimError> {
        let position = self.position(label)?;
        let (p0, p1) = self.branch_weights(position, basis);
        let probability = if outcome { p1 } else { p0 };
        if probability < 1e-12 {
            return Err(SimError::UnreachableBranch { probability });
        }
        self.collapse_remove(position, basis, outcome);
        Ok(probability)
    }

    fn branch_weights(&self, position: usize, basis: Basis) -> (f64, f64) {
        let mask = 1usize << self.bit_for_position(position);
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        match basis {
            Basis::Z => {
                for (idx, a) in self.amps.iter().enumerate() {
                    if idx & mask == 0 {
                        p0 += a.norm_sqr();
                    } else {
                        p1 += a.norm_sqr();
                    }
                }
            }
            Basis::X => {
                for idx in 0..self.amps.len() {
                    if idx & mask == 0 {
                        let a0 = self.amps[idx];
                        let a1 = self.amps[idx | mask];
                        p0 += 0.5 * (a0 + a1).norm_sqr();
                        p1 += 0.5 * (a0 - a1).norm_sqr();
                    }
                }
            }
        }
        (p0, p1)
    }

    fn collapse_remove(&mut self, position: usize, basis: Basis, outcome: bool) {
        let bit = self.bit_for_position(position);
        let mask = 1usize << bit;
        let low = mask - 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len() / 2];
        let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;
        for (packed, amp) in amps.iter_mut().enumerate() {
            let base = ((packed & !low) << 1) | (packed & low);
            *amp = match basis {
                Basis::Z => {
                    if outcome {
                        self.amps[base | mask]
                    } else {
                        self.amps[base]
                    }
                }
                Basis::X => {
                    let a0 = self.amps[base];
                    let a1 = self.amps[base | mask];
                    if outcome {
                        (a0 - a1) * sqrt_half
                    } else {
                        (a0 + a1) * sqrt_half
                    }
                }
            };
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(norm > 0.0, "collapsed onto a zero branch");
        let inv = Complex64::new(1.0 / norm, 0.0);
        for a in &mut amps {
            *a *= inv;
        }
        self.amps = amps;
        self.labels.remove(position);
    }

    /// Permutes the qubit ordering so that `labels()` equals `order`.
    pub fn reorder(&mut self, order: &[Label]) -> Result<(), SimError> {
        if order.len() != self.labels.len() {
            return Err(SimError::BadReorder);
        }
        if order == self.labels {
            return Ok(());
        }
        let count = self.labels.len();
        let mut old_bit_of_new = Vec::with_capacity(count);
        for label in order {
            let old_pos = self.position(*label).map_err(|_| SimError::BadReorder)?;
            old_bit_of_new.push(count - 1 - old_pos);
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (new_idx, amp) in amps.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (new_pos, old_bit) in old_bit_of_new.iter().enumerate() {
                let new_bit = count - 1 - new_pos;
                if new_idx & (1 << new_bit) != 0 {
                    old_idx |= 1 << old_bit;
                }
            }
            *amp = self.amps[old_idx];
        }
        self.amps = amps;
        self.labels = order.to_vec();
        Ok(())
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; u1 is kept away from zero.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// True when `a` equals `θ·b` for some unit-modulus θ, in max norm within
/// `tol`. θ is fixed from the largest-magnitude amplitude of `b`.
pub fn equal_up_to_phase(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool, SimError> {
    if a.live_count() != b.live_count() {
        return Err(SimError::DimensionMismatch {
            left: a.live_count(),
            right: b.live_count(),
        });
    }
    let mut pivot = 0;
    let mut best = 0.0;
    for (idx, amp) in b.amps.iter().enumerate() {
        let mag = amp.norm_sqr();
        if mag > best {
            best = mag;
            pivot = idx;
        }
    }
    if best == 0.0 {
        return Ok(a.amps.iter().all(|amp| amp.norm() <= tol));
    }
    let mut theta = a.amps[pivot] / b.amps[pivot];
    let mag = theta.norm();
    if mag > 0.0 {
        theta /= Complex64::new(mag, 0.0);
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .all(|(x, y)| (x - theta * y).norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn injections_have_the_defined_amplitudes() {
        let s = std::f64::consts::FRAC_1_SQRT_2;

        let mut state = StateVector::empty();
        state.inject(0, Injection::YPlus).unwrap();
        assert!((state.amplitudes()[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((state.amplitudes()[1] - c(0.0, s)).norm() < 1e-15);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);

        let mut state = StateVector::empty();
        state.inject(0, Injection::A).unwrap();
        let expected = c(s * (0.5f64).sqrt(), s * (0.5f64).sqrt());
        assert!((state.amplitudes()[1] - expected).norm() < 1e-12);

        let mut state = StateVector::empty();
        state.inject(3, Injection::YMinus).unwrap();
        assert!((state.amplitudes()[1] - c(0.0, -s)).norm() < 1e-15);
        assert_eq!(state.labels(), &[3]);
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let mut state = StateVector::zeros(2);
        assert_eq!(
            state.inject(1, Injection::YPlus).unwrap_err(),
            SimError::DuplicateLabel(1)
        );
    }

    #[test]
    fn cnot_flips_the_target_on_a_set_control() {
        // |10⟩ → |11⟩
        let mut state = StateVector::zeros(2);
        state.apply_unitary1(0, &Mat2::pauli_x()).unwrap();
        state.apply_cnot(0, 1).unwrap();
        assert!((state.amplitudes()[0b11].norm() - 1.0).abs() < 1e-12);

        // |00⟩ unchanged
        let mut state = StateVector::zeros(2);
        state.apply_cnot(0, 1).unwrap();
        assert!((state.amplitudes()[0b00].norm() - 1.0).abs() < 1e-12);

        assert_eq!(
            StateVector::zeros(2).apply_cnot(0, 0).unwrap_err(),
            SimError::SameLabel(0)
        );
    }

    #[test]
    fn cnot_swaps_target_amplitudes_under_a_set_control() {
        // |1⟩ ⊗ (a|0⟩ + b|1⟩) → |1⟩ ⊗ (b|0⟩ + a|1⟩)
        let a = c(0.6, 0.0);
        let b = c(0.0, 0.8);
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0b10] = a;
        amps[0b11] = b;
        let mut state = StateVector::from_amplitudes(amps).unwrap();
        state.apply_cnot(0, 1).unwrap();
        assert!((state.amplitudes()[0b10] - b).norm() < 1e-12);
        assert!((state.amplitudes()[0b11] - a).norm() < 1e-12);
    }

    #[test]
    fn unitary1_examples() {
        let mut state = StateVector::zeros(1);
        state.apply_unitary1(0, &Mat2::identity()).unwrap();
        assert!((state.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12);

        state.apply_unitary1(0, &Mat2::pauli_x()).unwrap();
        assert!((state.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-12);

        let h = crate::sim::ideal::hadamard();
        let mut state = StateVector::zeros(1);
        state.apply_unitary1(0, &h).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes()[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((state.amplitudes()[1] - c(s, 0.0)).norm() < 1e-12);

        let not_unitary = Mat2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(
            StateVector::zeros(1)
                .apply_unitary1(0, &not_unitary)
                .unwrap_err(),
            SimError::NotUnitary
        );
        assert_eq!(
            StateVector::zeros(1)
                .apply_unitary1(5, &Mat2::identity())
                .unwrap_err(),
            SimError::DeadLabel(5)
        );
    }

    #[test]
    fn eigenstate_measurements_are_deterministic_and_remove_the_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);

        let mut state = StateVector::zeros(1);
        let bit = state.measure(0, Basis::Z, &mut rng).unwrap();
        assert!(!bit);
        assert_eq!(state.live_count(), 0);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);

        let mut state = StateVector::zeros(1);
        state
            .apply_unitary1(0, &crate::sim::ideal::hadamard())
            .unwrap();
        let bit = state.measure(0, Basis::X, &mut rng).unwrap();
        assert!(!bit);
        assert_eq!(state.live_count(), 0);
    }

    #[test]
    fn superposition_z_statistics_are_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ones = 0usize;
        let trials = 10_000;
        for _ in 0..trials {
            let mut state = StateVector::zeros(1);
            state
                .apply_unitary1(0, &crate::sim::ideal::hadamard())
                .unwrap();
            if state.measure(0, Basis::Z, &mut rng).unwrap() {
                ones += 1;
            }
        }
        let fraction = ones as f64 / trials as f64;
        assert!((fraction - 0.5).abs() < 0.02, "fraction {fraction}");
    }

    #[test]
    fn projection_rejects_vanishing_branches() {
        let mut state = StateVector::zeros(1);
        let err = state.project(0, Basis::Z, true).unwrap_err();
        assert!(matches!(err, SimError::UnreachableBranch { .. }));

        let mut state = StateVector::zeros(1);
        let p = state.project(0, Basis::Z, false).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(state.live_count(), 0);
    }

    #[test]
    fn reorder_permutes_amplitudes() {
        // |01⟩ over labels [0, 1]: amplitude at index 0b01.
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0b01] = c(1.0, 0.0);
        let mut state = StateVector::from_amplitudes(amps).unwrap();
        state.reorder(&[1, 0]).unwrap();
        assert_eq!(state.labels(), &[1, 0]);
        assert!((state.amplitudes()[0b10] - c(1.0, 0.0)).norm() < 1e-12);

        assert_eq!(state.reorder(&[0]).unwrap_err(), SimError::BadReorder);
        assert_eq!(state.reorder(&[0, 2]).unwrap_err(), SimError::BadReorder);
    }

    #[test]
    fn capacity_is_enforced() {
        let mut state = StateVector::zeros(MAX_LIVE_QUBITS);
        assert_eq!(
            state.inject(99, Injection::YPlus).unwrap_err(),
            SimError::Capacity
        );
    }

    #[test]
    fn phase_insensitive_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let state = StateVector::random(2, &mut rng);

        let mut rotated = state.clone();
        let theta = Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
        for a in &mut rotated.amps {
            *a *= theta;
        }
        assert!(equal_up_to_phase(&state, &rotated, 1e-9).unwrap());

        let zero = StateVector::zeros(1);
        let mut one = StateVector::zeros(1);
        one.apply_unitary1(0, &Mat2::pauli_x()).unwrap();
        assert!(!equal_up_to_phase(&zero, &one, 1e-9).unwrap());

        assert!(matches!(
            equal_up_to_phase(&zero, &state, 1e-9).unwrap_err(),
            SimError::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn pauli_product_phase_identity() {
        // P·X·Z applied to |ψ⟩ equals i·X·P|ψ⟩ exactly, hence equal up to
        // phase.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = StateVector::random(1, &mut rng);
        let p = crate::sim::ideal::gate_matrix(crate::circuit::RotationKind::Rz4);

        let mut lhs = base.clone();
        lhs.apply_unitary1(0, &Mat2::pauli_z()).unwrap();
        lhs.apply_unitary1(0, &Mat2::pauli_x()).unwrap();
        lhs.apply_unitary1(0, &p).unwrap();

        let mut rhs = base.clone();
        rhs.apply_unitary1(0, &p).unwrap();
        rhs.apply_unitary1(0, &Mat2::pauli_x()).unwrap();

        assert!(equal_up_to_phase(&lhs, &rhs, 1e-12).unwrap());
    }

    #[test]
    fn operations_preserve_the_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = StateVector::random(3, &mut rng);
        state.apply_cnot(0, 2).unwrap();
        state
            .apply_unitary1(1, &crate::sim::ideal::hadamard())
            .unwrap();
        state.inject(7, Injection::A).unwrap();
        state.apply_cnot(7, 0).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        state.measure(7, Basis::Z, &mut rng).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
