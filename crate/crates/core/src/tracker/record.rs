//! Measurement records and their line-oriented text format.
//!
//! One line per rotational gate in circuit order. RX4 outcomes are `X+` or
//! `X-`; RZ4 outcomes `Z0` or `Z1`; RZ8 outcomes carry the first bit and,
//! only when the second teleportation stage ran, a second token:
//! `Z0`, `Z1`, `Z0 Z1`, `Z1 Z0`, ... Bits are raw detector readings, never
//! frame-adjusted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, RotationKind};
use crate::tracker::{Submitted, TrackerSession};

/// Recorded outcome of one rotational gate. `false` encodes |+⟩ (X basis)
/// or |0⟩ (Z basis).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Rx4(bool),
    Rz4(bool),
    Rz8 { first: bool, second: Option<bool> },
}

/// Ordered outcomes, one per rotational gate.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MeasurementRecord {
    entries: Vec<Outcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("line {line}: bad outcome token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: unexpected extra token {token:?}")]
    ExtraToken { line: usize, token: String },
    #[error("line {line}: a {kind} outcome cannot have a second token")]
    UnexpectedSecond { line: usize, kind: &'static str },
    #[error("line {line}: expected an {expected}-type outcome for the {kind} gate")]
    KindMismatch {
        line: usize,
        expected: &'static str,
        kind: &'static str,
    },
    #[error("record has {actual} outcome lines but the circuit has {expected} rotational gates")]
    LengthMismatch { expected: usize, actual: usize },
}

impl MeasurementRecord {
    pub fn from_entries(entries: Vec<Outcome>) -> MeasurementRecord {
        MeasurementRecord { entries }
    }

    pub fn entries(&self) -> &[Outcome] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses the record file against the circuit it belongs to; the gate
    /// sequence disambiguates single-token Z lines (RZ4 vs skipped-stage
    /// RZ8).
    pub fn parse(text: &str, circuit: &Circuit) -> Result<MeasurementRecord, RecordError> {
        let rotations: Vec<RotationKind> = circuit
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Rotation { kind, .. } => Some(*kind),
                Gate::Cnot { .. } => None,
            })
            .collect();

        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                lines.push((i + 1, body));
            }
        }
        if lines.len() != rotations.len() {
            return Err(RecordError::LengthMismatch {
                expected: rotations.len(),
                actual: lines.len(),
            });
        }

        let parse_x = |line: usize, token: &str| -> Result<bool, RecordError> {
            match token {
                "X+" => Ok(false),
                "X-" => Ok(true),
                _ => Err(RecordError::BadToken {
                    line,
                    token: token.to_string(),
                }),
            }
        };
        let parse_z = |line: usize, token: &str| -> Result<bool, RecordError> {
            match token {
                "Z0" => Ok(false),
                "Z1" => Ok(true),
                _ => Err(RecordError::BadToken {
                    line,
                    token: token.to_string(),
                }),
            }
        };

        let mut entries = Vec::with_capacity(rotations.len());
        for ((line, body), kind) in lines.into_iter().zip(rotations) {
            let mut tokens = body.split_whitespace();
            let first = tokens.next().expect("non-empty line");
            let second = tokens.next();
            if let Some(extra) = tokens.next() {
                return Err(RecordError::ExtraToken {
                    line,
                    token: extra.to_string(),
                });
            }
            let entry = match kind {
                RotationKind::Rx4 => {
                    if first.starts_with('Z') {
                        return Err(RecordError::KindMismatch {
                            line,
                            expected: "X",
                            kind: "RX4",
                        });
                    }
                    if second.is_some() {
                        return Err(RecordError::UnexpectedSecond { line, kind: "RX4" });
                    }
                    Outcome::Rx4(parse_x(line, first)?)
                }
                RotationKind::Rz4 => {
                    if first.starts_with('X') {
                        return Err(RecordError::KindMismatch {
                            line,
                            expected: "Z",
                            kind: "RZ4",
                        });
                    }
                    if second.is_some() {
                        return Err(RecordError::UnexpectedSecond { line, kind: "RZ4" });
                    }
                    Outcome::Rz4(parse_z(line, first)?)
                }
                RotationKind::Rz8 => {
                    if first.starts_with('X') {
                        return Err(RecordError::KindMismatch {
                            line,
                            expected: "Z",
                            kind: "RZ8",
                        });
                    }
                    Outcome::Rz8 {
                        first: parse_z(line, first)?,
                        second: second.map(|t| parse_z(line, t)).transpose()?,
                    }
                }
            };
            entries.push(entry);
        }
        Ok(MeasurementRecord { entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            match entry {
                Outcome::Rx4(bit) => out.push_str(if *bit { "X-\n" } else { "X+\n" }),
                Outcome::Rz4(bit) => out.push_str(if *bit { "Z1\n" } else { "Z0\n" }),
                Outcome::Rz8 { first, second } => {
                    out.push_str(if *first { "Z1" } else { "Z0" });
                    if let Some(bit) = second {
                        out.push_str(if *bit { " Z1" } else { " Z0" });
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Synthesizes a record from seeded random bits, with RZ8 branch structure
/// made consistent by the streaming rule. Stands in for hardware outcomes at
/// benchmark scale, where simulation is impossible.
pub fn synthesize_record(circuit: &Circuit, seed: u64) -> MeasurementRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut session = TrackerSession::new(circuit);
    let mut entries = Vec::with_capacity(circuit.rotation_count());
    while let Some(pending) = session.next_rotation().expect("fresh session") {
        let bit = rng.gen::<bool>();
        let submitted = session.submit_outcome(bit).expect("rotation pending");
        match pending.kind {
            RotationKind::Rx4 => entries.push(Outcome::Rx4(bit)),
            RotationKind::Rz4 => entries.push(Outcome::Rz4(bit)),
            RotationKind::Rz8 => {
                let second = if submitted == Submitted::SecondStagePending {
                    let bit2 = rng.gen::<bool>();
                    session.submit_second(bit2).expect("second stage pending");
                    Some(bit2)
                } else {
                    None
                };
                entries.push(Outcome::Rz8 { first: bit, second });
            }
        }
    }
    MeasurementRecord { entries }
}
