use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::qasm::format_angle;
use crate::circuit::{to_openqasm, Circuit, GateKind};

/// Target language of generated code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnippetDialect {
    /// OpenQASM 2.0, normative for circuits.
    Openqasm2,
    /// Best-effort Qiskit Python template.
    Qiskit,
    /// `qcwb` command line, normative for machine-property selections.
    WorkbenchCli,
}

impl SnippetDialect {
    pub fn name(self) -> &'static str {
        match self {
            SnippetDialect::Openqasm2 => "openqasm2",
            SnippetDialect::Qiskit => "qiskit",
            SnippetDialect::WorkbenchCli => "workbench-cli",
        }
    }
}

impl fmt::Display for SnippetDialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnippetError {
    #[error("unknown dialect '{0}' (expected openqasm2, qiskit or workbench-cli)")]
    UnknownDialect(String),
    #[error("dialect {dialect} cannot express {what}")]
    Unsupported { dialect: SnippetDialect, what: &'static str },
    #[error("empty selection")]
    EmptySelection,
}

impl FromStr for SnippetDialect {
    type Err = SnippetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "openqasm2" => Ok(SnippetDialect::Openqasm2),
            "qiskit" => Ok(SnippetDialect::Qiskit),
            "workbench-cli" => Ok(SnippetDialect::WorkbenchCli),
            other => Err(SnippetError::UnknownDialect(other.to_string())),
        }
    }
}

/// Source text that rebuilds `circuit` in the given dialect.
pub fn emit_snippet(circuit: &Circuit, dialect: SnippetDialect) -> Result<String, SnippetError> {
    match dialect {
        SnippetDialect::Openqasm2 => Ok(to_openqasm(circuit)),
        SnippetDialect::Qiskit => Ok(qiskit_circuit(circuit)),
        SnippetDialect::WorkbenchCli => Err(SnippetError::Unsupported {
            dialect,
            what: "a circuit",
        }),
    }
}

fn qiskit_circuit(circuit: &Circuit) -> String {
    let mut out = String::from("from math import pi\n\nfrom qiskit import QuantumCircuit\n\n");
    let name = if circuit.name.is_empty() {
        String::new()
    } else {
        format!(", name={}", serde_json::to_string(&circuit.name).expect("string"))
    };
    let _ = writeln!(out, "qc = QuantumCircuit({}, {}{name})", circuit.n_qubits, circuit.n_clbits);
    for g in &circuit.gates {
        let qubits = g.qubits.iter().map(ToString::to_string).collect::<Vec<_>>();
        match g.kind {
            GateKind::Measure => {
                let _ = writeln!(out, "qc.measure({}, {})", g.qubits[0], g.clbits[0]);
            }
            GateKind::Mcx => {
                let (target, controls) = qubits.split_last().expect("mcx has qubits");
                let _ = writeln!(out, "qc.mcx([{}], {target})", controls.join(", "));
            }
            kind => {
                let args: Vec<String> = g.params.iter().map(|p| format_angle(*p)).chain(qubits).collect();
                let _ = writeln!(out, "qc.{}({})", kind.name(), args.join(", "));
            }
        }
    }
    out
}
