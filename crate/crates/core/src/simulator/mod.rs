//! Ideal statevector simulation, shot sampling, Pauli expectations and the
//! Monte-Carlo error adjustment of measured counts.

mod adjust;
mod sample;
mod state;

use std::collections::BTreeSet;

use crate::catalog::MachineProperties;
use crate::circuit::GateKind;
use crate::transpiler::{gate_error, CompiledCircuit};

pub use adjust::{
    adjust_counts, adjust_counts_with, ci_overlap, summarize, AdjustOptions, AdjustedOutcomes,
    OutcomeStats, DEFAULT_TRIALS, MAX_ADJUST_BITS,
};
pub use sample::{format_bitstring, outcome_distribution, sample_counts, Counts};
pub use state::{pauli_expectation, statevector, State, MAX_SIM_QUBITS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("too many qubits to simulate: {n_qubits} > {max}")]
    TooManyQubits { n_qubits: usize, max: usize },
    #[error("no measured qubits: add MEASURE gates or enable measure_all")]
    NoMeasuredQubits,
    #[error("{0}")]
    Observable(String),
    #[error("error probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("bit width {n_bits} unsupported (1..={max})")]
    BitWidth { n_bits: usize, max: usize },
    #[error("bitstring '{key}' inconsistent with n_bits = {n_bits}")]
    BitstringMismatch { key: String, n_bits: usize },
    #[error("too many shots: {0}")]
    TooManyShots(u64),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("no error rate for {0}")]
    MissingErrorEntry(String),
}

/// Probability that a single shot of `compiled` suffers at least one gate or
/// readout error on `machine`.
///
/// Every non-measure gate contributes `1 - error`; each measured physical
/// qubit contributes `1 - readout_error` once.
pub fn shot_error_probability(
    compiled: &CompiledCircuit,
    machine: &MachineProperties,
) -> Result<f64, SimError> {
    let mut clean = 1.0;
    let mut measured = BTreeSet::new();
    for g in &compiled.circuit.gates {
        match g.kind {
            GateKind::Barrier => {}
            GateKind::Measure => {
                measured.insert(g.qubits[0]);
            }
            _ => {
                clean *= 1.0 - gate_error(g, machine).map_err(|e| SimError::MissingErrorEntry(e.to_string()))?;
            }
        }
    }
    for q in measured {
        let r = machine
            .readout_error(q)
            .ok_or_else(|| SimError::MissingErrorEntry(format!("readout error of qubit {q}")))?;
        clean *= 1.0 - r;
    }
    Ok((1.0 - clean).clamp(0.0, 1.0))
}
