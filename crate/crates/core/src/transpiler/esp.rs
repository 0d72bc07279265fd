use serde::{Deserialize, Serialize};

use super::{CompiledCircuit, TranspileError};
use crate::catalog::MachineProperties;
use crate::circuit::{GateInstance, GateKind};

/// Estimated success probabilities per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EspReport {
    pub layerwise: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// `per_qubit_cumulative[layer][physical qubit]`
    pub per_qubit_cumulative: Vec<Vec<f64>>,
}

impl EspReport {
    /// Cumulative ESP after the last layer (1.0 for an empty circuit).
    pub fn final_esp(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(1.0)
    }
}

/// Error rate the machine reports for `g`; measurements use the readout error.
pub fn gate_error(g: &GateInstance, machine: &MachineProperties) -> Result<f64, TranspileError> {
    let missing = || TranspileError::MissingErrorEntry {
        gate_id: g.id,
        kind: g.kind.name().to_string(),
        qubits: g.qubits.clone(),
    };
    match g.kind {
        GateKind::Barrier => Ok(0.0),
        GateKind::Measure => machine.readout_error(g.qubits[0]).ok_or_else(missing),
        kind => machine
            .gate_entry(kind.name(), &g.qubits)
            .map(|e| e.error)
            .ok_or_else(missing),
    }
}

/// Layer-wise, cumulative and per-qubit cumulative success products.
pub fn compute_esp(compiled: &CompiledCircuit, machine: &MachineProperties) -> Result<EspReport, TranspileError> {
    let circuit = &compiled.circuit;
    let mut per_qubit = vec![1.0; circuit.n_qubits];
    let mut running = 1.0;
    let mut report = EspReport {
        layerwise: Vec::with_capacity(compiled.layers.len()),
        cumulative: Vec::with_capacity(compiled.layers.len()),
        per_qubit_cumulative: Vec::with_capacity(compiled.layers.len()),
    };
    for layer in &compiled.layers {
        let mut product = 1.0;
        for &id in layer {
            let g = circuit.gate(id).ok_or(TranspileError::UnknownGateId(id))?;
            let success = 1.0 - gate_error(g, machine)?;
            product *= success;
            for &q in &g.qubits {
                per_qubit[q] *= success;
            }
        }
        running *= product;
        report.layerwise.push(product);
        report.cumulative.push(running);
        report.per_qubit_cumulative.push(per_qubit.clone());
    }
    Ok(report)
}
