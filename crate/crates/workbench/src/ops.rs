//! Operations shared by the HTTP handlers and the command line, so both
//! surfaces return byte-identical documents for the same inputs.

use std::collections::BTreeMap;

use qcwb_core::catalog::{
    emit_property_snippet, select_properties, MachineProperties, MachineStatus, PropertySelection,
};
use qcwb_core::circuit::{build_circuit, from_openqasm, Circuit, CircuitDocument};
use qcwb_core::simulator::{
    adjust_counts_with, sample_counts, shot_error_probability, AdjustOptions, AdjustedOutcomes, Counts,
};
use qcwb_core::transpiler::{compute_esp, transpile, CompiledCircuit, CompiledDocument, EspReport};
use qcwb_core::writer::{emit_snippet, synthesize, ConceptualSpec, SnippetDialect};
use qcwb_core::Diagnostics;
use serde::Serialize;

use crate::config::Limits;
use crate::error::WorkbenchError;

/// Reads a circuit from either a JSON circuit document or OpenQASM 2 text.
pub fn parse_circuit_text(text: &str) -> Result<Circuit, WorkbenchError> {
    if text.trim_start().starts_with("OPENQASM") {
        return from_openqasm(text).map_err(WorkbenchError::Rejected);
    }
    let doc = CircuitDocument::from_json(text).map_err(WorkbenchError::Rejected)?;
    circuit_from_document(&doc)
}

pub fn circuit_from_document(doc: &CircuitDocument) -> Result<Circuit, WorkbenchError> {
    build_circuit(doc).map_err(WorkbenchError::Rejected)
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisResult {
    pub circuit: CircuitDocument,
    pub diagnostics: Diagnostics,
    /// Generated code by dialect name; empty while errors are present.
    pub snippets: BTreeMap<String, String>,
}

impl SynthesisResult {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.has_errors()
    }
}

/// Compiles a conceptual spec. Diagnostics are part of the result rather
/// than a failure so an editor can show them inline next to the partial circuit.
pub fn synthesize_spec(spec: &ConceptualSpec) -> SynthesisResult {
    let (circuit, diagnostics) = synthesize(spec);
    let mut snippets = BTreeMap::new();
    if !diagnostics.has_errors() {
        for dialect in [SnippetDialect::Openqasm2, SnippetDialect::Qiskit] {
            if let Ok(code) = emit_snippet(&circuit, dialect) {
                snippets.insert(dialect.name().to_string(), code);
            }
        }
    }
    SynthesisResult {
        circuit: circuit.to_document(),
        diagnostics,
        snippets,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranspileResult {
    pub compiled: CompiledDocument,
    pub esp: EspReport,
}

pub fn transpile_with_esp(
    circuit: &Circuit,
    machine: &MachineProperties,
) -> Result<(CompiledCircuit, EspReport), WorkbenchError> {
    let compiled = transpile(circuit, machine)?;
    let esp = compute_esp(&compiled, machine)?;
    Ok((compiled, esp))
}

pub fn transpile_document(circuit: &Circuit, machine: &MachineProperties) -> Result<TranspileResult, WorkbenchError> {
    let (compiled, esp) = transpile_with_esp(circuit, machine)?;
    Ok(TranspileResult {
        compiled: compiled.to_document(),
        esp,
    })
}

fn check_shots(shots: u64, limits: &Limits) -> Result<(), WorkbenchError> {
    if shots > limits.max_shots {
        return Err(WorkbenchError::rejected(
            "limit",
            format!("shots {shots} exceed the limit of {}", limits.max_shots),
        ));
    }
    Ok(())
}

/// Ideal counts from sampling the statevector of `circuit`.
pub fn simulate(circuit: &Circuit, shots: u64, seed: u64, limits: &Limits) -> Result<Counts, WorkbenchError> {
    check_shots(shots, limits)?;
    if circuit.n_qubits > limits.max_qubits_sim {
        return Err(WorkbenchError::rejected(
            "too_many_qubits",
            format!(
                "circuit has {} qubits; simulation is limited to {} (the number of qubits exceeded)",
                circuit.n_qubits, limits.max_qubits_sim
            ),
        ));
    }
    Ok(sample_counts(circuit, shots, seed)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorAdjustResult {
    pub machine: String,
    pub ideal: Counts,
    pub p_err: f64,
    pub adjusted: AdjustedOutcomes,
}

/// Samples ideal counts, derives the per-shot error probability of the
/// circuit compiled for `machine`, and spreads erroneous shots by Monte Carlo.
pub fn error_adjust(
    circuit: &Circuit,
    machine: &MachineProperties,
    shots: u64,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
    limits: &Limits,
) -> Result<ErrorAdjustResult, WorkbenchError> {
    if trials > limits.max_trials {
        return Err(WorkbenchError::rejected(
            "limit",
            format!("trials {trials} exceed the limit of {}", limits.max_trials),
        ));
    }
    if threads == Some(0) {
        return Err(WorkbenchError::rejected("threads", "at least one thread is required"));
    }
    let ideal = simulate(circuit, shots, seed, limits)?;
    let compiled = transpile(circuit, machine)?;
    let p_err = shot_error_probability(&compiled, machine)?;
    let options = AdjustOptions {
        threads,
        keep_raw: false,
    };
    let adjusted = adjust_counts_with(&ideal, p_err, circuit.n_clbits, trials, seed, &options)?;
    Ok(ErrorAdjustResult {
        machine: machine.name.clone(),
        ideal,
        p_err,
        adjusted,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MachineSummary {
    pub name: String,
    pub n_qubits: usize,
    pub status: MachineStatus,
    pub basis_gates: Vec<String>,
    pub mean_gate_error: f64,
}

impl From<&MachineProperties> for MachineSummary {
    fn from(m: &MachineProperties) -> Self {
        Self {
            name: m.name.clone(),
            n_qubits: m.n_qubits,
            status: m.status.clone(),
            basis_gates: m.basis_gates.clone(),
            mean_gate_error: m.mean_gate_error(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnippetResult {
    pub selection: PropertySelection,
    pub dialect: SnippetDialect,
    pub snippet: String,
}

/// Resolves `paths` on `machine` and renders the selection as code.
pub fn property_snippet<S: AsRef<str>>(
    machine: &MachineProperties,
    paths: &[S],
    dialect: SnippetDialect,
) -> Result<SnippetResult, WorkbenchError> {
    let selection = select_properties(machine, paths);
    let snippet =
        emit_property_snippet(&selection, dialect).map_err(|e| WorkbenchError::rejected("snippet", e.to_string()))?;
    Ok(SnippetResult {
        selection,
        dialect,
        snippet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcwb_core::catalog::{generate_machine, Topology};

    const BELL: &str = r#"{"n_qubits":2,"n_clbits":2,"gates":[
        {"kind":"h","qubits":[0]},{"kind":"cx","qubits":[0,1]},
        {"kind":"measure","qubits":[0],"clbits":[0]},{"kind":"measure","qubits":[1],"clbits":[1]}]}"#;

    #[test]
    fn json_and_qasm_inputs_agree() {
        let c = parse_circuit_text(BELL).unwrap();
        let qasm = qcwb_core::circuit::to_openqasm(&c);
        let back = parse_circuit_text(&qasm).unwrap();
        assert_eq!(back.gates, c.gates);
    }

    #[test]
    fn bad_document_is_rejected_with_diagnostics() {
        let err = parse_circuit_text(r#"{"n_qubits":1,"gates":[{"kind":"x","qubits":[3]}]}"#).unwrap_err();
        assert!(matches!(err, WorkbenchError::Rejected(_)));
        assert!(err.diagnostics().mentions("index out of range"));
    }

    #[test]
    fn synthesis_errors_suppress_snippets() {
        let spec: ConceptualSpec =
            serde_json::from_str(r#"{"register_size":2,"ops":[{"op":"bell_pair","q0":0,"q1":5}]}"#).unwrap();
        let r = synthesize_spec(&spec);
        assert!(r.has_errors());
        assert!(r.snippets.is_empty());
    }

    #[test]
    fn adjust_reports_every_outcome() {
        let m = generate_machine(7, 2, Topology::Line, 1.0).unwrap();
        let c = parse_circuit_text(BELL).unwrap();
        let r = error_adjust(&c, &m, 100, 50, 1, Some(1), &Limits::default()).unwrap();
        assert_eq!(r.adjusted.outcomes.len(), 4);
        assert_eq!(r.ideal.shots, 100);
        assert!(r.p_err > 0.0 && r.p_err < 1.0);
    }

    #[test]
    fn limits_are_enforced() {
        let c = parse_circuit_text(BELL).unwrap();
        let limits = Limits {
            max_shots: 10,
            ..Limits::default()
        };
        assert!(simulate(&c, 11, 0, &limits).is_err());
        let wide = Circuit::new(17, 0);
        assert!(simulate(&wide, 1, 0, &Limits::default())
            .unwrap_err()
            .to_string()
            .contains("the number of qubits exceeded"));
    }
}
