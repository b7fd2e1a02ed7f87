//! The four-element correction-status algebra shared by the tracker and the
//! simulator.
//!
//! A status records which Pauli correction is still pending on a logical
//! qubit: none, a bit flip, a phase flip, or both. Statuses form a Klein
//! four-group under composition; global phase is deliberately not part of the
//! representation. The matrix realisation ([`PauliStatus::matrix`]) retains
//! phases and is only ever compared phase-insensitively by the simulator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

/// Pending correction attached to one logical qubit.
///
/// Encoded as a flag pair: bit 0 is the X (bit-flip) component, bit 1 the Z
/// (phase-flip) component, so flips and composition are XORs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum PauliStatus {
    I = 0b00,
    X = 0b01,
    Z = 0b10,
    XZ = 0b11,
}

impl PauliStatus {
    /// All four statuses in flag order.
    pub const ALL: [PauliStatus; 4] = [
        PauliStatus::I,
        PauliStatus::X,
        PauliStatus::Z,
        PauliStatus::XZ,
    ];

    /// Status from its flag pair (low bit = X component, high bit = Z).
    #[inline]
    pub fn from_bits(bits: u8) -> PauliStatus {
        match bits & 0b11 {
            0b00 => PauliStatus::I,
            0b01 => PauliStatus::X,
            0b10 => PauliStatus::Z,
            _ => PauliStatus::XZ,
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self as u8
    }

    /// True when an X correction is pending.
    #[inline]
    pub fn x_flag(self) -> bool {
        self.bits() & 0b01 != 0
    }

    /// True when a Z correction is pending.
    #[inline]
    pub fn z_flag(self) -> bool {
        self.bits() & 0b10 != 0
    }

    /// `s ⊕ X`: toggles the X component (I↔X, Z↔XZ).
    #[inline]
    pub fn flip_x(self) -> PauliStatus {
        PauliStatus::from_bits(self.bits() ^ 0b01)
    }

    /// `s ⊕ Z`: toggles the Z component (I↔Z, X↔XZ).
    #[inline]
    pub fn flip_z(self) -> PauliStatus {
        PauliStatus::from_bits(self.bits() ^ 0b10)
    }

    /// Group product with the global phase discarded. Every element is its
    /// own inverse.
    #[inline]
    pub fn compose(self, other: PauliStatus) -> PauliStatus {
        PauliStatus::from_bits(self.bits() ^ other.bits())
    }

    /// The 2x2 matrix realisation: I, X, Z, or the product X·Z.
    pub fn matrix(self) -> Mat2 {
        match self {
            PauliStatus::I => Mat2::identity(),
            PauliStatus::X => Mat2::pauli_x(),
            PauliStatus::Z => Mat2::pauli_z(),
            PauliStatus::XZ => Mat2::pauli_x().mul(&Mat2::pauli_z()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PauliStatus::I => "I",
            PauliStatus::X => "X",
            PauliStatus::Z => "Z",
            PauliStatus::XZ => "XZ",
        }
    }
}

impl std::ops::Mul for PauliStatus {
    type Output = PauliStatus;

    fn mul(self, rhs: PauliStatus) -> PauliStatus {
        self.compose(rhs)
    }
}

impl fmt::Display for PauliStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for unrecognised status names.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown correction status {0:?} (expected I, X, Z or XZ)")]
pub struct ParseStatusError(pub String);

impl FromStr for PauliStatus {
    type Err = ParseStatusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(PauliStatus::I),
            "X" => Ok(PauliStatus::X),
            "Z" => Ok(PauliStatus::Z),
            "XZ" => Ok(PauliStatus::XZ),
            other => Err(ParseStatusError(other.to_string())),
        }
    }
}

/// Dense 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Mat2 {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Mat2 {
        Mat2::from_reals(1.0, 0.0, 0.0, 1.0)
    }

    pub fn pauli_x() -> Mat2 {
        Mat2::from_reals(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_z() -> Mat2 {
        Mat2::from_reals(1.0, 0.0, 0.0, -1.0)
    }

    fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2([
            [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        Mat2(out)
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    /// Checks M·M† = I entrywise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.mul(&self.adjoint());
        let id = Mat2::identity();
        for i in 0..2 {
            for j in 0..2 {
                if (prod.0[i][j] - id.0[i][j]).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Entrywise equality after dividing out one global phase, within `tol`.
    pub fn eq_up_to_phase(&self, rhs: &Mat2, tol: f64) -> bool {
        let mut phase = None;
        let mut best = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mag = rhs.0[i][j].norm();
                if mag > best {
                    best = mag;
                    phase = Some(self.0[i][j] / rhs.0[i][j]);
                }
            }
        }
        let Some(mut theta) = phase else {
            return self.0.iter().flatten().all(|c| c.norm() <= tol);
        };
        if theta.norm() > 0.0 {
            theta /= Complex64::new(theta.norm(), 0.0);
        }
        for i in 0..2 {
            for j in 0..2 {
                if (self.0[i][j] - theta * rhs.0[i][j]).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_tables_match_the_four_group() {
        use PauliStatus::*;
        assert_eq!(I.flip_x(), X);
        assert_eq!(X.flip_x(), I);
        assert_eq!(Z.flip_x(), XZ);
        assert_eq!(XZ.flip_x(), Z);
        assert_eq!(I.flip_z(), Z);
        assert_eq!(X.flip_z(), XZ);
        assert_eq!(Z.flip_z(), I);
        assert_eq!(XZ.flip_z(), X);
    }

    #[test]
    fn flips_are_commuting_involutions() {
        for s in PauliStatus::ALL {
            assert_eq!(s.flip_x().flip_x(), s);
            assert_eq!(s.flip_z().flip_z(), s);
            assert_eq!(s.flip_x().flip_z(), s.flip_z().flip_x());
        }
    }

    #[test]
    fn generation_from_identity_is_transitive() {
        use std::collections::BTreeSet;
        let mut seen = BTreeSet::new();
        let mut frontier = vec![PauliStatus::I];
        while let Some(s) = frontier.pop() {
            if seen.insert(s) {
                frontier.push(s.flip_x());
                frontier.push(s.flip_z());
            }
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn compose_is_the_group_product() {
        use PauliStatus::*;
        assert_eq!(X.compose(Z), XZ);
        assert_eq!(XZ.compose(Z), X);
        for s in PauliStatus::ALL {
            assert_eq!(I.compose(s), s);
            assert_eq!(s.compose(s), I);
            for t in PauliStatus::ALL {
                assert_eq!(s.compose(t), t.compose(s));
                for u in PauliStatus::ALL {
                    assert_eq!(s.compose(t).compose(u), s.compose(t.compose(u)));
                }
            }
        }
    }

    #[test]
    fn matrices_match_their_definitions() {
        let x = PauliStatus::X.matrix();
        assert_eq!(x.0[0][1], Complex64::new(1.0, 0.0));
        assert_eq!(x.0[1][0], Complex64::new(1.0, 0.0));
        assert_eq!(x.0[0][0], Complex64::new(0.0, 0.0));

        let z = PauliStatus::Z.matrix();
        assert_eq!(z.0[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(z.0[1][1], Complex64::new(-1.0, 0.0));

        // X·Z = [[0,-1],[1,0]]
        let xz = PauliStatus::XZ.matrix();
        assert_eq!(xz.0[0][1], Complex64::new(-1.0, 0.0));
        assert_eq!(xz.0[1][0], Complex64::new(1.0, 0.0));

        for s in PauliStatus::ALL {
            assert!(s.matrix().is_unitary(1e-12));
        }
        assert_eq!(PauliStatus::I.matrix(), Mat2::identity());
    }

    #[test]
    fn flips_agree_with_left_multiplication_up_to_phase() {
        for s in PauliStatus::ALL {
            let fx = s.flip_x().matrix();
            let xm = Mat2::pauli_x().mul(&s.matrix());
            assert!(fx.eq_up_to_phase(&xm, 1e-12), "flip_x vs X·M for {s}");

            let fz = s.flip_z().matrix();
            let zm = Mat2::pauli_z().mul(&s.matrix());
            assert!(fz.eq_up_to_phase(&zm, 1e-12), "flip_z vs Z·M for {s}");
        }
    }

    #[test]
    fn status_names_round_trip() {
        for s in PauliStatus::ALL {
            assert_eq!(s.as_str().parse::<PauliStatus>().unwrap(), s);
        }
        assert!("Y".parse::<PauliStatus>().is_err());
    }
}
