//! Logical circuit IR: construction, validation, documents, OpenQASM text and
//! a dense-unitary oracle for tests.

mod document;
mod gate;
mod observable;
pub mod qasm;
pub mod unitary;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostic, Diagnostics};

pub use document::{build_circuit, CircuitDocument, GateDocument};
pub use gate::{GateInstance, GateKind, GateOp, QubitArity, UnknownGateKind};
pub use observable::{parse_pauli_observable, ObservableError, PauliObservable};
pub use qasm::{from_openqasm, to_openqasm};
pub use unitary::{unitary_of, UnitaryError, UnitaryMatrix};

/// Ordered gate list over a qubit register.
///
/// Qubit 0 is the least-significant bit of basis indices and bitstrings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub n_qubits: usize,
    pub n_clbits: usize,
    pub gates: Vec<GateInstance>,
    pub observables: Vec<PauliObservable>,
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Self {
        Self {
            name: String::new(),
            n_qubits,
            n_clbits,
            gates: Vec::new(),
            observables: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn next_id(&self) -> usize {
        self.gates.iter().map(|g| g.id + 1).max().unwrap_or(0)
    }

    /// Appends a gate and returns its id. Rejected gates leave the circuit untouched.
    pub fn append_gate(
        &mut self,
        kind: GateKind,
        qubits: &[usize],
        params: &[f64],
    ) -> Result<usize, Diagnostics> {
        self.append_op(GateOp::with_params(kind, qubits.to_vec(), params.to_vec()))
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<usize, Diagnostics> {
        self.append_op(GateOp::measure(qubit, clbit))
    }

    pub fn append_op(&mut self, op: GateOp) -> Result<usize, Diagnostics> {
        let id = self.next_id();
        let gate = op.with_id(id);
        let mut diags: Diagnostics = check_gate(&gate, self.n_qubits, self.n_clbits).into_iter().collect();
        if gate.kind == GateKind::Measure && diags.is_empty() {
            let pair = (gate.qubits[0], gate.clbits[0]);
            if self
                .gates
                .iter()
                .any(|g| g.kind == GateKind::Measure && (g.qubits[0], g.clbits[0]) == pair)
            {
                diags.push(duplicate_measure(pair).with_gate(id));
            }
        }
        if diags.has_errors() {
            return Err(diags);
        }
        self.gates.push(gate);
        Ok(id)
    }

    /// Unchecked append used by passes whose output is valid by construction.
    pub(crate) fn push_unchecked(&mut self, op: GateOp) -> usize {
        let id = self.next_id();
        self.gates.push(op.with_id(id));
        id
    }

    pub fn gate(&self, id: usize) -> Option<&GateInstance> {
        self.gates
            .binary_search_by_key(&id, |g| g.id)
            .ok()
            .map(|i| &self.gates[i])
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(|g| g.kind == GateKind::Measure)
    }

    /// Circuit with the same register and only the unitary gates.
    pub fn without_measurements(&self) -> Circuit {
        let mut c = self.clone();
        c.gates.retain(|g| g.kind.is_unitary());
        c
    }

    pub fn validate(&self) -> Diagnostics {
        validate_circuit(self)
    }
}

fn duplicate_measure((q, c): (usize, usize)) -> Diagnostic {
    Diagnostic::error(
        "duplicate_measure",
        format!("duplicate measurement of qubit {q} into clbit {c}"),
    )
}

/// Checks one gate against register sizes. Returned entries carry the gate id.
pub(crate) fn check_gate(gate: &GateInstance, n_qubits: usize, n_clbits: usize) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let kind = gate.kind;
    let id = gate.id;
    if !kind.qubit_arity().accepts(gate.qubits.len()) {
        out.push(
            Diagnostic::error(
                "arity",
                format!(
                    "arity mismatch: {kind} takes {} qubit(s), got {}",
                    kind.qubit_arity(),
                    gate.qubits.len()
                ),
            )
            .with_gate(id),
        );
    }
    if gate.params.len() != kind.param_arity() {
        out.push(
            Diagnostic::error(
                "arity",
                format!(
                    "arity mismatch: {kind} takes {} angle(s), got {}",
                    kind.param_arity(),
                    gate.params.len()
                ),
            )
            .with_gate(id),
        );
    }
    if gate.clbits.len() != kind.clbit_arity() {
        out.push(
            Diagnostic::error(
                "arity",
                format!(
                    "arity mismatch: {kind} takes {} classical bit(s), got {}",
                    kind.clbit_arity(),
                    gate.clbits.len()
                ),
            )
            .with_gate(id),
        );
    }
    if gate.params.iter().any(|p| !p.is_finite()) {
        out.push(Diagnostic::error("angle", format!("non-finite angle in {kind}")).with_gate(id));
    }
    for &q in &gate.qubits {
        if q >= n_qubits {
            out.push(
                Diagnostic::error(
                    "qubit_range",
                    format!(
                        "index out of range: qubit {q} in a {n_qubits}-qubit register (the number of qubits exceeded)"
                    ),
                )
                .with_gate(id),
            );
        }
    }
    let mut seen = HashSet::new();
    for &q in &gate.qubits {
        if !seen.insert(q) {
            out.push(
                Diagnostic::error(
                    "duplicate_qubit",
                    format!("duplicate qubit in gate: qubit {q} appears more than once in {kind}"),
                )
                .with_gate(id),
            );
            break;
        }
    }
    for &c in &gate.clbits {
        if c >= n_clbits {
            out.push(
                Diagnostic::error(
                    "clbit_range",
                    format!("clbit out of range: clbit {c} with {n_clbits} classical bit(s)"),
                )
                .with_gate(id),
            );
        }
    }
    out
}

/// Reports every violation in `circuit`. An empty result means the circuit is valid.
pub fn validate_circuit(circuit: &Circuit) -> Diagnostics {
    let mut diags = Diagnostics::new();
    if circuit.n_qubits == 0 {
        diags.push(Diagnostic::error(
            "register",
            "register must contain at least one qubit",
        ));
    }
    let mut prev_id: Option<usize> = None;
    let mut measured = HashSet::new();
    for gate in &circuit.gates {
        if let Some(p) = prev_id {
            if gate.id <= p {
                diags.push(
                    Diagnostic::error(
                        "gate_id_order",
                        format!("gate ids must be strictly increasing: {} follows {p}", gate.id),
                    )
                    .with_gate(gate.id),
                );
            }
        }
        prev_id = Some(gate.id);
        let found = check_gate(gate, circuit.n_qubits, circuit.n_clbits);
        let ok = found.is_empty();
        diags.0.extend(found);
        if ok && gate.kind == GateKind::Measure {
            let pair = (gate.qubits[0], gate.clbits[0]);
            if !measured.insert(pair) {
                diags.push(duplicate_measure(pair).with_gate(gate.id));
            }
        }
    }
    for obs in &circuit.observables {
        if let Err(e) = obs.check(circuit.n_qubits) {
            diags.push(e.to_diagnostic());
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.append_gate(GateKind::H, &[0], &[]).unwrap();
        c.append_gate(GateKind::Cx, &[0, 1], &[]).unwrap();
        c
    }

    #[test]
    fn append_assigns_sequential_ids() {
        let mut c = Circuit::new(1, 0);
        assert_eq!(c.append_gate(GateKind::H, &[0], &[]).unwrap(), 0);
        assert_eq!(c.append_gate(GateKind::X, &[0], &[]).unwrap(), 1);
    }

    #[test]
    fn append_rejects_duplicate_qubit_without_mutation() {
        let mut c = Circuit::new(2, 0);
        let err = c.append_gate(GateKind::Cx, &[0, 0], &[]).unwrap_err();
        assert!(err.mentions("duplicate qubit in gate"));
        assert!(c.gates.is_empty());
    }

    #[test]
    fn append_measure_needs_clbit() {
        let mut c = Circuit::new(2, 0);
        let err = c.measure(1, 0).unwrap_err();
        assert!(err.mentions("clbit out of range"));
        assert!(c.gates.is_empty());
    }

    #[test]
    fn append_rejects_param_arity() {
        let mut c = Circuit::new(1, 0);
        assert!(c.append_gate(GateKind::Rz, &[0], &[]).unwrap_err().mentions("arity mismatch"));
        assert!(c.append_gate(GateKind::H, &[0], &[1.0]).is_err());
        assert!(c.append_gate(GateKind::Rz, &[0], &[f64::NAN]).is_err());
    }

    #[test]
    fn duplicate_measure_pair_rejected() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0).unwrap();
        assert!(c.measure(0, 0).unwrap_err().mentions("duplicate measurement"));
    }

    #[test]
    fn valid_bell_has_no_diagnostics() {
        assert!(validate_circuit(&bell()).is_empty());
    }

    #[test]
    fn observable_length_is_validated() {
        let mut c = bell();
        c.observables.push(PauliObservable {
            label: "ZZZ".into(),
            coefficient: 1.0,
        });
        let d = validate_circuit(&c);
        assert!(d.has_errors());
        assert!(d.mentions("observable length mismatch"));
    }

    #[test]
    fn qubit_count_exceeded() {
        let mut c = Circuit::new(3, 0);
        c.gates.push(GateOp::one(GateKind::X, 5).with_id(0));
        let d = validate_circuit(&c);
        assert!(d.mentions("the number of qubits exceeded"));
        assert_eq!(d.0[0].gate_id, Some(0));
    }

    #[test]
    fn unordered_ids_reported() {
        let mut c = Circuit::new(1, 0);
        c.gates.push(GateOp::one(GateKind::X, 0).with_id(3));
        c.gates.push(GateOp::one(GateKind::X, 0).with_id(1));
        assert!(validate_circuit(&c).mentions("strictly increasing"));
    }

    #[test]
    fn validate_is_pure() {
        let mut c = bell();
        c.gates.push(GateOp::cx(1, 1).with_id(9));
        assert_eq!(validate_circuit(&c), validate_circuit(&c));
    }

    #[test]
    fn gate_lookup_by_id() {
        let c = bell();
        assert_eq!(c.gate(1).unwrap().kind, GateKind::Cx);
        assert!(c.gate(7).is_none());
    }
}
