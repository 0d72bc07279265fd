use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::observable::parse_unchecked;
use super::{validate_circuit, Circuit, GateInstance, GateKind};
use crate::diagnostics::{Diagnostic, Diagnostics};

/// External JSON shape of a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_clbits: Option<usize>,
    pub gates: Vec<GateDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDocument {
    /// Optional explicit id; when omitted ids are assigned in document order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clbits: Vec<usize>,
}

impl CircuitDocument {
    pub fn from_json(text: &str) -> Result<Self, Diagnostics> {
        serde_json::from_str(text).map_err(|e| {
            Diagnostic::error("schema", format!("schema violation: {e}")).into()
        })
    }
}

impl From<&GateInstance> for GateDocument {
    fn from(g: &GateInstance) -> Self {
        Self {
            id: Some(g.id),
            kind: g.kind.name().to_string(),
            qubits: g.qubits.clone(),
            params: g.params.clone(),
            clbits: g.clbits.clone(),
        }
    }
}

impl From<&Circuit> for CircuitDocument {
    fn from(c: &Circuit) -> Self {
        Self {
            name: (!c.name.is_empty()).then(|| c.name.clone()),
            n_qubits: c.n_qubits,
            n_clbits: Some(c.n_clbits),
            gates: c.gates.iter().map(GateDocument::from).collect(),
            observables: c.observables.iter().map(ToString::to_string).collect(),
            metadata: c.metadata.clone(),
        }
    }
}

impl Circuit {
    pub fn to_document(&self) -> CircuitDocument {
        CircuitDocument::from(self)
    }
}

/// Builds a validated circuit from its document form. Never returns a partial circuit.
pub fn build_circuit(doc: &CircuitDocument) -> Result<Circuit, Diagnostics> {
    let mut diags = Diagnostics::new();

    let explicit = doc.gates.iter().filter(|g| g.id.is_some()).count();
    if explicit != 0 && explicit != doc.gates.len() {
        diags.push(Diagnostic::error(
            "schema",
            "schema violation: gate ids must be given for all gates or for none",
        ));
    }

    let mut gates = Vec::with_capacity(doc.gates.len());
    for (index, g) in doc.gates.iter().enumerate() {
        let id = g.id.unwrap_or(index);
        match g.kind.parse::<GateKind>() {
            Ok(kind) => gates.push(GateInstance {
                id,
                kind,
                qubits: g.qubits.clone(),
                params: g.params.clone(),
                clbits: g.clbits.clone(),
            }),
            Err(e) => diags.push(
                Diagnostic::error("schema", format!("schema violation: {e}")).with_gate(id),
            ),
        }
    }

    let mut observables = Vec::with_capacity(doc.observables.len());
    for text in &doc.observables {
        match parse_unchecked(text) {
            Ok(o) => observables.push(o),
            Err(e) => diags.push(e.to_diagnostic()),
        }
    }

    let n_clbits = doc.n_clbits.unwrap_or_else(|| {
        gates
            .iter()
            .flat_map(|g| g.clbits.iter().map(|c| c + 1))
            .max()
            .unwrap_or(0)
    });

    let circuit = Circuit {
        name: doc.name.clone().unwrap_or_default(),
        n_qubits: doc.n_qubits,
        n_clbits,
        gates,
        observables,
        metadata: doc.metadata.clone(),
    };
    diags.extend(validate_circuit(&circuit));
    if diags.has_errors() {
        Err(diags)
    } else {
        Ok(circuit)
    }
}
