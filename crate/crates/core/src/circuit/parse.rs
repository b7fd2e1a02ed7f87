//! Line-oriented circuit text format.
//!
//! First effective line is `qubits <n>`; each following line is one gate:
//! `CNOT <c> <t>`, `RX4 <q>`, `RZ4 <q>`, `RZ8 <q>`. `#` starts a comment,
//! blank lines are ignored. The extended format additionally accepts
//! `H <q>`, `P <q>` and `T <q>` for input to the lowering pass.

use super::lower::{ExtCircuit, ExtGate, SingleKind};
use super::{Circuit, Gate, RotationKind};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected header `qubits <n>`")]
    MissingHeader,
    #[error("bad qubit count {0:?}")]
    BadQubitCount(String),
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("unknown mnemonic {0:?}")]
    UnknownMnemonic(String),
    #[error("{mnemonic} is only valid in the extended format")]
    ExtendedOnly { mnemonic: String },
    #[error("{mnemonic} takes {expected} operand(s), found {found}")]
    OperandCount {
        mnemonic: String,
        expected: usize,
        found: usize,
    },
    #[error("bad qubit index {0:?}")]
    BadIndex(String),
    #[error("qubit {qubit} out of range for {qubit_count} qubits")]
    QubitOutOfRange { qubit: usize, qubit_count: usize },
    #[error("CNOT control equals target ({0})")]
    ControlEqualsTarget(usize),
}

fn effective_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

fn parse_index(token: &str, line: usize) -> Result<usize, ParseError> {
    token.parse::<usize>().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::BadIndex(token.to_string()),
    })
}

fn parse_gates(text: &str, extended: bool) -> Result<(usize, Vec<(usize, ExtGate)>), ParseError> {
    let mut lines = effective_lines(text);

    let (header_line, header) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("qubits") {
        return Err(ParseError {
            line: header_line,
            kind: ParseErrorKind::MissingHeader,
        });
    }
    let count_token = header_tokens.next().unwrap_or("");
    if count_token.is_empty() || header_tokens.next().is_some() {
        return Err(ParseError {
            line: header_line,
            kind: ParseErrorKind::BadQubitCount(header.to_string()),
        });
    }
    let qubit_count: usize = count_token.parse().map_err(|_| ParseError {
        line: header_line,
        kind: ParseErrorKind::BadQubitCount(count_token.to_string()),
    })?;
    if qubit_count == 0 {
        return Err(ParseError {
            line: header_line,
            kind: ParseErrorKind::ZeroQubits,
        });
    }

    let mut gates = Vec::new();
    for (line, body) in lines {
        let mut tokens = body.split_whitespace();
        let mnemonic = tokens.next().expect("effective lines are non-empty");
        let operands: Vec<&str> = tokens.collect();

        let expect_operands = |expected: usize| -> Result<(), ParseError> {
            if operands.len() != expected {
                Err(ParseError {
                    line,
                    kind: ParseErrorKind::OperandCount {
                        mnemonic: mnemonic.to_string(),
                        expected,
                        found: operands.len(),
                    },
                })
            } else {
                Ok(())
            }
        };

        let check_range = |qubit: usize| -> Result<usize, ParseError> {
            if qubit >= qubit_count {
                Err(ParseError {
                    line,
                    kind: ParseErrorKind::QubitOutOfRange { qubit, qubit_count },
                })
            } else {
                Ok(qubit)
            }
        };

        let single = |kind: SingleKind, operands: &[&str]| -> Result<ExtGate, ParseError> {
            expect_operands(1)?;
            let qubit = check_range(parse_index(operands[0], line)?)?;
            Ok(ExtGate::Single { kind, qubit })
        };

        let gate = match mnemonic {
            "CNOT" => {
                expect_operands(2)?;
                let control = check_range(parse_index(operands[0], line)?)?;
                let target = check_range(parse_index(operands[1], line)?)?;
                if control == target {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::ControlEqualsTarget(control),
                    });
                }
                ExtGate::Cnot { control, target }
            }
            "RX4" => single(SingleKind::Rx4, &operands)?,
            "RZ4" => single(SingleKind::Rz4, &operands)?,
            "RZ8" => single(SingleKind::Rz8, &operands)?,
            "H" | "P" | "T" if !extended => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::ExtendedOnly {
                        mnemonic: mnemonic.to_string(),
                    },
                });
            }
            "H" => single(SingleKind::H, &operands)?,
            "P" => single(SingleKind::P, &operands)?,
            "T" => single(SingleKind::T, &operands)?,
            other => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::UnknownMnemonic(other.to_string()),
                });
            }
        };
        gates.push((line, gate));
    }

    Ok((qubit_count, gates))
}

/// Parses the base format; round-trips with [`serialize_circuit`].
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let (qubit_count, ext_gates) = parse_gates(text, false)?;
    let gates = ext_gates
        .into_iter()
        .map(|(_, gate)| match gate {
            ExtGate::Cnot { control, target } => Gate::Cnot { control, target },
            ExtGate::Single { kind, qubit } => Gate::Rotation {
                kind: kind
                    .rotation()
                    .expect("base parse admits rotation mnemonics only"),
                qubit,
            },
        })
        .collect();
    Ok(Circuit::new(qubit_count, gates).expect("parser enforces circuit invariants"))
}

/// Parses the extended format accepted by the lowering pass.
pub fn parse_ext_circuit(text: &str) -> Result<ExtCircuit, ParseError> {
    let (qubit_count, ext_gates) = parse_gates(text, true)?;
    let gates = ext_gates.into_iter().map(|(_, gate)| gate).collect();
    Ok(ExtCircuit::new(qubit_count, gates).expect("parser enforces circuit invariants"))
}

/// Canonical text form: header plus one gate per line.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.qubit_count());
    for gate in circuit.gates() {
        match *gate {
            Gate::Cnot { control, target } => {
                out.push_str(&format!("CNOT {control} {target}\n"));
            }
            Gate::Rotation { kind, qubit } => {
                out.push_str(&format!("{} {qubit}\n", kind.mnemonic()));
            }
        }
    }
    out
}

pub fn serialize_ext_circuit(circuit: &ExtCircuit) -> String {
    let mut out = format!("qubits {}\n", circuit.qubit_count());
    for gate in circuit.gates() {
        match *gate {
            ExtGate::Cnot { control, target } => {
                out.push_str(&format!("CNOT {control} {target}\n"));
            }
            ExtGate::Single { kind, qubit } => {
                out.push_str(&format!("{} {qubit}\n", kind.mnemonic()));
            }
        }
    }
    out
}

impl SingleKind {
    fn rotation(self) -> Option<RotationKind> {
        match self {
            SingleKind::Rx4 => Some(RotationKind::Rx4),
            SingleKind::Rz4 => Some(RotationKind::Rz4),
            SingleKind::Rz8 => Some(RotationKind::Rz8),
            SingleKind::H | SingleKind::P | SingleKind::T => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_simple_circuit() {
        let c = parse_circuit("qubits 2\nRX4 0\nCNOT 0 1\n").unwrap();
        assert_eq!(c.qubit_count(), 2);
        assert_eq!(
            c.gates(),
            &[
                Gate::Rotation {
                    kind: RotationKind::Rx4,
                    qubit: 0
                },
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
            ]
        );
    }

    #[test]
    fn parses_the_two_qubit_worked_example() {
        let text = "qubits 2\nRX4 0\nCNOT 0 1\nRZ8 1\nCNOT 0 1\nRZ4 1\nRZ4 0\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(serialize_circuit(&c), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let c =
            parse_circuit("# header comment\n\nqubits 3 # three\n\nRZ4 2 # last qubit\n").unwrap();
        assert_eq!(c.qubit_count(), 3);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn empty_circuit_serializes_to_header_only() {
        let c = Circuit::new(1, vec![]).unwrap();
        assert_eq!(serialize_circuit(&c), "qubits 1\n");
    }

    #[test]
    fn error_reports_carry_line_numbers() {
        let err = parse_circuit("qubits 2\nRX4 0\nFOO 1\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(matches!(err.kind, ParseErrorKind::UnknownMnemonic(ref m) if m == "FOO"));

        let err = parse_circuit("qubits 2\nRX4 5\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(
            err.kind,
            ParseErrorKind::QubitOutOfRange { qubit: 5, .. }
        ));

        let err = parse_circuit("qubits 1\nCNOT 0 0\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.kind, ParseErrorKind::ControlEqualsTarget(0));

        let err = parse_circuit("RX4 0\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingHeader);

        let err = parse_circuit("qubits 0\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ZeroQubits);

        let err = parse_circuit("qubits 2\nCNOT 0\n").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::OperandCount {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn clifford_t_mnemonics_require_the_extended_format() {
        let err = parse_circuit("qubits 1\nH 0\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ExtendedOnly { .. }));

        let ext = parse_ext_circuit("qubits 1\nH 0\nP 0\nT 0\nRZ8 0\n").unwrap();
        assert_eq!(ext.gates().len(), 4);
        assert_eq!(
            serialize_ext_circuit(&ext),
            "qubits 1\nH 0\nP 0\nT 0\nRZ8 0\n"
        );
    }
}
