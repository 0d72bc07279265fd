//! Logical circuit to machine-executable circuit: basis decomposition, layout
//! and routing, ASAP layering, gate provenance and ESP analytics.

mod decompose;
mod esp;
mod layers;
mod route;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::MachineProperties;
use crate::circuit::{validate_circuit, Circuit, CircuitDocument, GateKind};
use crate::diagnostics::{Diagnostic, Diagnostics};

pub use decompose::{decompose_gate, decompose_to_basis, REQUIRED_BASIS};
pub use esp::{compute_esp, gate_error, EspReport};
pub use layers::layerize;
pub use route::layout_and_route;

/// Where a compiled gate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Logical(usize),
    Routing,
    LayoutBookkeeping,
}

/// Compiled gate id to origin.
pub type ProvenanceMap = BTreeMap<usize, Origin>;

/// Logical qubit to physical qubit, before and after routing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub initial: BTreeMap<usize, usize>,
    #[serde(rename = "final")]
    pub final_layout: BTreeMap<usize, usize>,
}

impl Layout {
    pub fn identity(n: usize) -> Self {
        let m: BTreeMap<usize, usize> = (0..n).map(|q| (q, q)).collect();
        Self {
            initial: m.clone(),
            final_layout: m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    /// Over physical qubits; ids continue after the largest logical id so the
    /// two circuits never share an id.
    pub circuit: Circuit,
    pub layout: Layout,
    /// Gate ids per ASAP layer. Barriers are not placed in layers.
    pub layers: Vec<Vec<usize>>,
    pub provenance: ProvenanceMap,
    pub machine: String,
}

/// Serialized form: the circuit document fields plus compilation data.
#[derive(Debug, Clone, Serialize)]
pub struct CompiledDocument {
    #[serde(flatten)]
    pub circuit: CircuitDocument,
    pub layout: Layout,
    pub layers: Vec<Vec<usize>>,
    pub provenance: ProvenanceMap,
    pub machine: String,
}

impl CompiledCircuit {
    pub fn to_document(&self) -> CompiledDocument {
        CompiledDocument {
            circuit: self.circuit.to_document(),
            layout: self.layout.clone(),
            layers: self.layers.clone(),
            provenance: self.provenance.clone(),
            machine: self.machine.clone(),
        }
    }

    /// Compiled gate ids derived from logical gate `id`.
    pub fn image_of(&self, logical_id: usize) -> Vec<usize> {
        self.provenance
            .iter()
            .filter(|(_, o)| **o == Origin::Logical(logical_id))
            .map(|(id, _)| *id)
            .collect()
    }

    /// Describes every broken structural guarantee; empty when all hold.
    pub fn invariant_violations(&self, logical: &Circuit, machine: &MachineProperties) -> Vec<String> {
        let mut bad = Vec::new();
        let basis = machine_basis(machine);
        let c = &self.circuit;
        for g in &c.gates {
            if g.kind.is_unitary() && !basis.contains(&g.kind) {
                bad.push(format!("gate {} has non-basis kind {}", g.id, g.kind));
            }
            if g.kind.is_unitary() && g.qubits.len() == 2 && !machine.has_edge(g.qubits[0], g.qubits[1]) {
                bad.push(format!("gate {} on uncoupled pair {:?}", g.id, g.qubits));
            }
            if !self.provenance.contains_key(&g.id) {
                bad.push(format!("gate {} has no origin", g.id));
            }
            if logical.gate(g.id).is_some() {
                bad.push(format!("gate id {} also used by the logical circuit", g.id));
            }
        }
        for id in self.provenance.keys() {
            if c.gate(*id).is_none() {
                bad.push(format!("provenance entry for unknown gate {id}"));
            }
        }
        let covered: BTreeSet<usize> = self
            .provenance
            .values()
            .filter_map(|o| match o {
                Origin::Logical(id) => Some(*id),
                _ => None,
            })
            .collect();
        for g in &logical.gates {
            if !covered.contains(&g.id) {
                bad.push(format!("logical gate {} has no compiled image", g.id));
            }
        }
        // Layers: each non-barrier gate exactly once, disjoint qubits, per-qubit order kept.
        let mut layer_of = BTreeMap::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut used = BTreeSet::new();
            for &id in layer {
                let Some(g) = c.gate(id) else {
                    bad.push(format!("layer {i} references unknown gate {id}"));
                    continue;
                };
                if layer_of.insert(id, i).is_some() {
                    bad.push(format!("gate {id} placed twice"));
                }
                for &q in &g.qubits {
                    if !used.insert(q) {
                        bad.push(format!("layer {i} uses qubit {q} twice"));
                    }
                }
            }
        }
        let mut last = vec![None::<usize>; c.n_qubits];
        for g in c.gates.iter().filter(|g| g.kind != GateKind::Barrier) {
            let Some(&l) = layer_of.get(&g.id) else {
                bad.push(format!("gate {} not in any layer", g.id));
                continue;
            };
            for &q in &g.qubits {
                if last[q].is_some_and(|p| p >= l) {
                    bad.push(format!("gate {} breaks the order on qubit {q}", g.id));
                }
                last[q] = Some(l);
            }
        }
        for (name, map) in [("initial", &self.layout.initial), ("final", &self.layout.final_layout)] {
            let image: BTreeSet<_> = map.values().collect();
            if map.len() != logical.n_qubits || image.len() != map.len() || image.iter().any(|&&p| p >= c.n_qubits) {
                bad.push(format!("{name} layout is not a bijection onto physical qubits"));
            }
        }
        bad
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TranspileError {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(Diagnostics),
    #[error("machine basis lacks required kinds: {}", .0.join(", "))]
    BasisMissing(Vec<String>),
    #[error("circuit needs {n_qubits} qubits but machine '{machine}' has {available} (the number of qubits exceeded)")]
    TooManyQubits {
        n_qubits: usize,
        machine: String,
        available: usize,
    },
    #[error("no route between physical qubits {a} and {b}")]
    NoRoute { a: usize, b: usize },
    #[error("gate {gate_id} ({kind}) acts on {n_qubits} qubits; routing handles at most two")]
    UnsupportedGate {
        gate_id: usize,
        kind: String,
        n_qubits: usize,
    },
    #[error("missing error entry for gate {gate_id}: {kind} on {qubits:?}")]
    MissingErrorEntry {
        gate_id: usize,
        kind: String,
        qubits: Vec<usize>,
    },
    #[error("unknown gate id {0}")]
    UnknownGateId(usize),
}

impl TranspileError {
    pub fn to_diagnostics(&self) -> Diagnostics {
        match self {
            TranspileError::InvalidCircuit(d) => d.clone(),
            TranspileError::MissingErrorEntry { gate_id, .. } => {
                Diagnostic::error("missing_error_entry", self.to_string()).with_gate(*gate_id).into()
            }
            TranspileError::UnsupportedGate { gate_id, .. } => {
                Diagnostic::error("unsupported_gate", self.to_string()).with_gate(*gate_id).into()
            }
            TranspileError::BasisMissing(_) => Diagnostic::error("basis", self.to_string()).into(),
            TranspileError::TooManyQubits { .. } => Diagnostic::error("too_many_qubits", self.to_string()).into(),
            TranspileError::NoRoute { .. } => Diagnostic::error("no_route", self.to_string()).into(),
            TranspileError::UnknownGateId(_) => Diagnostic::error("unknown_gate", self.to_string()).into(),
        }
    }
}

/// Gate kinds named in the machine's basis (unknown names are ignored).
pub fn machine_basis(machine: &MachineProperties) -> BTreeSet<GateKind> {
    machine
        .basis_gates
        .iter()
        .filter_map(|k| k.parse::<GateKind>().ok())
        .filter(|k| k.is_unitary())
        .collect()
}

/// Decompose, route and layer `circuit` for `machine`.
pub fn transpile(circuit: &Circuit, machine: &MachineProperties) -> Result<CompiledCircuit, TranspileError> {
    let diags = validate_circuit(circuit);
    if diags.has_errors() {
        return Err(TranspileError::InvalidCircuit(diags));
    }
    if circuit.n_qubits > machine.n_qubits {
        return Err(TranspileError::TooManyQubits {
            n_qubits: circuit.n_qubits,
            machine: machine.name.clone(),
            available: machine.n_qubits,
        });
    }
    let (decomposed, from_logical) = decompose_to_basis(circuit, &machine_basis(machine))?;
    let (routed, layout, from_decomposed) = layout_and_route(&decomposed, machine)?;

    let offset = circuit.gates.iter().map(|g| g.id + 1).max().unwrap_or(0);
    let mut compiled = routed;
    compiled.observables.clear();
    let mut provenance = ProvenanceMap::new();
    for (i, g) in compiled.gates.iter_mut().enumerate() {
        let origin = match from_decomposed[&g.id] {
            Origin::Logical(d) => from_logical[&d],
            other => other,
        };
        g.id = offset + i;
        provenance.insert(g.id, origin);
    }
    let layers = layerize(&compiled);
    Ok(CompiledCircuit {
        circuit: compiled,
        layout,
        layers,
        provenance,
        machine: machine.name.clone(),
    })
}
