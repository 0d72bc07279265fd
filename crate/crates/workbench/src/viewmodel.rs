//! Everything a circuit viewer needs to draw the logical and compiled
//! diagrams side by side, animate execution layer by layer, and answer
//! "where did this gate come from" without further requests.

use std::collections::{BTreeMap, HashMap};

use qcwb_core::catalog::MachineProperties;
use qcwb_core::circuit::{Circuit, CircuitDocument, GateKind};
use qcwb_core::transpiler::{gate_error, layerize, EspReport, Layout, Origin, ProvenanceMap};
use serde::Serialize;

use crate::error::WorkbenchError;
use crate::ops::transpile_with_esp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Logical,
    Compiled,
}

/// Grid position of one gate: column is its ASAP layer, rows its qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub gate_id: usize,
    pub column: usize,
    pub rows: Vec<usize>,
    /// Barriers occupy no layer; they are drawn as a separator before `column`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub separator: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagram {
    pub circuit: CircuitDocument,
    pub n_rows: usize,
    pub n_columns: usize,
    pub placements: Vec<Placement>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnimationFrame {
    pub layer: usize,
    pub active_gates: Vec<usize>,
    /// Physical couplings exercised by two-qubit gates in this layer.
    pub edges: Vec<[usize; 2]>,
    /// Per-qubit cumulative success probability after this layer.
    pub qubit_colors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateDetail {
    pub side: Side,
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub clbits: Vec<usize>,
    /// Calibrated error rate (compiled gates only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    /// Where a compiled gate came from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<Origin>,
    /// Compiled images of a logical gate, or the logical source of a compiled one.
    pub related: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ViewModel {
    pub machine: String,
    pub logical: Diagram,
    pub compiled: Diagram,
    pub layout: Layout,
    pub provenance: ProvenanceMap,
    pub esp: EspReport,
    pub frames: Vec<AnimationFrame>,
    /// Keyed by gate id; logical and compiled ids never collide.
    pub details: BTreeMap<usize, GateDetail>,
}

fn diagram(circuit: &Circuit, layers: &[Vec<usize>]) -> Diagram {
    let column_of: HashMap<usize, usize> = layers
        .iter()
        .enumerate()
        .flat_map(|(col, ids)| ids.iter().map(move |&id| (id, col)))
        .collect();
    let mut next_column = 0;
    let mut placements = Vec::with_capacity(circuit.gates.len());
    for g in &circuit.gates {
        let (column, separator) = match column_of.get(&g.id) {
            Some(&col) => (col, false),
            None => (next_column, true),
        };
        if !separator {
            next_column = next_column.max(column + 1);
        }
        let rows = if g.kind == GateKind::Barrier && g.qubits.is_empty() {
            (0..circuit.n_qubits).collect()
        } else {
            g.qubits.clone()
        };
        placements.push(Placement {
            gate_id: g.id,
            column,
            rows,
            separator,
        });
    }
    Diagram {
        circuit: circuit.to_document(),
        n_rows: circuit.n_qubits,
        n_columns: layers.len(),
        placements,
    }
}

/// Transpiles `logical` for `machine` and assembles the viewer model.
pub fn build_view_model(logical: &Circuit, machine: &MachineProperties) -> Result<ViewModel, WorkbenchError> {
    let (compiled, esp) = transpile_with_esp(logical, machine)?;
    let compiled_circuit = &compiled.circuit;

    let frames = compiled
        .layers
        .iter()
        .enumerate()
        .map(|(layer, ids)| AnimationFrame {
            layer,
            active_gates: ids.clone(),
            edges: ids
                .iter()
                .filter_map(|&id| compiled_circuit.gate(id))
                .filter(|g| g.qubits.len() == 2 && g.kind != GateKind::Barrier)
                .map(|g| [g.qubits[0], g.qubits[1]])
                .collect(),
            qubit_colors: esp.per_qubit_cumulative[layer].clone(),
        })
        .collect();

    let mut details = BTreeMap::new();
    for g in &logical.gates {
        details.insert(
            g.id,
            GateDetail {
                side: Side::Logical,
                kind: g.kind.name().to_string(),
                qubits: g.qubits.clone(),
                params: g.params.clone(),
                clbits: g.clbits.clone(),
                error: None,
                origin: None,
                related: compiled.image_of(g.id),
            },
        );
    }
    for g in &compiled_circuit.gates {
        let origin = compiled.provenance.get(&g.id).copied();
        let related = match origin {
            Some(Origin::Logical(id)) => vec![id],
            _ => Vec::new(),
        };
        details.insert(
            g.id,
            GateDetail {
                side: Side::Compiled,
                kind: g.kind.name().to_string(),
                qubits: g.qubits.clone(),
                params: g.params.clone(),
                clbits: g.clbits.clone(),
                error: Some(gate_error(g, machine)?),
                origin,
                related,
            },
        );
    }

    Ok(ViewModel {
        machine: machine.name.clone(),
        logical: diagram(logical, &layerize(logical)),
        compiled: diagram(compiled_circuit, &compiled.layers),
        layout: compiled.layout.clone(),
        provenance: compiled.provenance.clone(),
        esp,
        frames,
        details,
    })
}
