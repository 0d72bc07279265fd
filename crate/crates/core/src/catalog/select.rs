//! Property paths, selections and the snippets that replay them.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::machine::MachineProperties;
use crate::writer::{SnippetDialect, SnippetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitField {
    T1Us,
    T2Us,
    FrequencyGhz,
    ReadoutError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateField {
    Error,
    DurationNs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusField {
    Operational,
    PendingJobs,
    LastCalibrated,
}

/// A parsed property selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyPath {
    Qubit { index: usize, field: QubitField },
    Gate { kind: String, qubits: Vec<usize>, field: GateField },
    Status(StatusField),
    CouplingMap,
    Name,
    NQubits,
    BasisGates,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid property path '{path}': {reason}")]
pub struct PathError {
    pub path: String,
    pub reason: String,
}

impl QubitField {
    const ALL: [(QubitField, &'static str, &'static str); 4] = [
        (QubitField::T1Us, "t1_us", "µs"),
        (QubitField::T2Us, "t2_us", "µs"),
        (QubitField::FrequencyGhz, "frequency_ghz", "GHz"),
        (QubitField::ReadoutError, "readout_error", ""),
    ];
}

impl GateField {
    const ALL: [(GateField, &'static str, &'static str); 2] = [
        (GateField::Error, "error", ""),
        (GateField::DurationNs, "duration_ns", "ns"),
    ];
}

impl StatusField {
    const ALL: [(StatusField, &'static str); 3] = [
        (StatusField::Operational, "operational"),
        (StatusField::PendingJobs, "pending_jobs"),
        (StatusField::LastCalibrated, "last_calibrated"),
    ];
}

fn lookup<T: Copy + PartialEq>(table: &[(T, &'static str, &'static str)], key: T) -> (&'static str, &'static str) {
    let (_, name, unit) = table.iter().find(|(k, _, _)| *k == key).expect("field in table");
    (name, unit)
}

impl PropertyPath {
    /// Unit of the resolved value; empty for dimensionless or non-numeric values.
    pub fn unit(&self) -> &'static str {
        match self {
            PropertyPath::Qubit { field, .. } => lookup(&QubitField::ALL, *field).1,
            PropertyPath::Gate { field, .. } => lookup(&GateField::ALL, *field).1,
            _ => "",
        }
    }

    pub fn resolve(&self, m: &MachineProperties) -> Result<Value, String> {
        Ok(match self {
            PropertyPath::Qubit { index, field } => {
                let q = m.qubits.get(*index).ok_or_else(|| {
                    format!(
                        "index out of range: qubits[{index}] on a {}-qubit machine",
                        m.qubits.len()
                    )
                })?;
                json!(match field {
                    QubitField::T1Us => q.t1_us,
                    QubitField::T2Us => q.t2_us,
                    QubitField::FrequencyGhz => q.frequency_ghz,
                    QubitField::ReadoutError => q.readout_error,
                })
            }
            PropertyPath::Gate { kind, qubits, field } => {
                if let Some(&q) = qubits.iter().find(|&&q| q >= m.n_qubits) {
                    return Err(format!(
                        "index out of range: qubit {q} on a {}-qubit machine",
                        m.n_qubits
                    ));
                }
                let g = m
                    .gates
                    .iter()
                    .find(|g| &g.kind == kind && &g.qubits == qubits)
                    .ok_or_else(|| format!("no gate entry for {kind} on {qubits:?}"))?;
                json!(match field {
                    GateField::Error => g.error,
                    GateField::DurationNs => g.duration_ns,
                })
            }
            PropertyPath::Status(f) => match f {
                StatusField::Operational => json!(m.status.operational),
                StatusField::PendingJobs => json!(m.status.pending_jobs),
                StatusField::LastCalibrated => json!(m.status.last_calibrated),
            },
            PropertyPath::CouplingMap => json!(m.coupling_map),
            PropertyPath::Name => json!(m.name),
            PropertyPath::NQubits => json!(m.n_qubits),
            PropertyPath::BasisGates => json!(m.basis_gates),
        })
    }
}

impl fmt::Display for PropertyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyPath::Qubit { index, field } => {
                write!(f, "qubits[{index}].{}", lookup(&QubitField::ALL, *field).0)
            }
            PropertyPath::Gate { kind, qubits, field } => {
                let qs: Vec<String> = qubits.iter().map(ToString::to_string).collect();
                write!(f, "gates[{kind}:{}].{}", qs.join(","), lookup(&GateField::ALL, *field).0)
            }
            PropertyPath::Status(s) => {
                let name = StatusField::ALL.iter().find(|(k, _)| k == s).expect("status field").1;
                write!(f, "status.{name}")
            }
            PropertyPath::CouplingMap => f.write_str("coupling_map"),
            PropertyPath::Name => f.write_str("name"),
            PropertyPath::NQubits => f.write_str("n_qubits"),
            PropertyPath::BasisGates => f.write_str("basis_gates"),
        }
    }
}

impl FromStr for PropertyPath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| PathError {
            path: s.to_string(),
            reason: reason.to_string(),
        };
        let text = s.trim();
        match text {
            "coupling_map" => return Ok(PropertyPath::CouplingMap),
            "name" => return Ok(PropertyPath::Name),
            "n_qubits" => return Ok(PropertyPath::NQubits),
            "basis_gates" => return Ok(PropertyPath::BasisGates),
            _ => {}
        }
        if let Some(field) = text.strip_prefix("status.") {
            return StatusField::ALL
                .iter()
                .find(|(_, n)| *n == field)
                .map(|(k, _)| PropertyPath::Status(*k))
                .ok_or_else(|| fail("unknown status field"));
        }
        let (head, rest) = text
            .split_once('[')
            .ok_or_else(|| fail("expected qubits[i].<field>, gates[<kind>:<qubits>].<field>, status.<field>, coupling_map, name, n_qubits or basis_gates"))?;
        let (inside, field) = rest
            .split_once("].")
            .ok_or_else(|| fail("expected '].<field>' after the index"))?;
        match head {
            "qubits" => {
                let index = inside.trim().parse().map_err(|_| fail("qubit index is not a number"))?;
                let field = QubitField::ALL
                    .iter()
                    .find(|(_, n, _)| *n == field)
                    .map(|(k, _, _)| *k)
                    .ok_or_else(|| fail("unknown qubit field"))?;
                Ok(PropertyPath::Qubit { index, field })
            }
            "gates" => {
                let (kind, qs) = inside
                    .split_once(':')
                    .ok_or_else(|| fail("expected <kind>:<q0>(,<q1>) in gate selector"))?;
                let kind = kind.trim();
                if kind.is_empty() {
                    return Err(fail("empty gate kind"));
                }
                let qubits = qs
                    .split(',')
                    .map(|q| q.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| fail("gate qubit is not a number"))?;
                if qubits.is_empty() || qubits.len() > 2 {
                    return Err(fail("gate selector takes one or two qubits"));
                }
                let field = GateField::ALL
                    .iter()
                    .find(|(_, n, _)| *n == field)
                    .map(|(k, _, _)| *k)
                    .ok_or_else(|| fail("unknown gate field"))?;
                Ok(PropertyPath::Gate {
                    kind: kind.to_string(),
                    qubits,
                    field,
                })
            }
            _ => Err(fail("unknown property group")),
        }
    }
}

/// One selected path with either its resolved snapshot or an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySelection {
    pub machine: String,
    pub entries: Vec<SelectionEntry>,
}

impl PropertySelection {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.entries.iter().any(|e| e.error.is_some())
    }
}

/// Resolves each path independently; order is preserved and one bad path
/// does not affect the others.
pub fn select_properties<S: AsRef<str>>(machine: &MachineProperties, paths: &[S]) -> PropertySelection {
    let entries = paths
        .iter()
        .map(|raw| {
            let raw = raw.as_ref();
            let resolved = raw
                .parse::<PropertyPath>()
                .map_err(|e| e.to_string())
                .and_then(|p| p.resolve(machine).map(|v| (p, v)));
            match resolved {
                Ok((p, value)) => SelectionEntry {
                    path: p.to_string(),
                    value: Some(value),
                    unit: Some(p.unit().to_string()),
                    error: None,
                },
                Err(error) => SelectionEntry {
                    path: raw.to_string(),
                    value: None,
                    unit: None,
                    error: Some(error),
                },
            }
        })
        .collect();
    PropertySelection {
        machine: machine.name.clone(),
        entries,
    }
}

fn shell_word(s: &str) -> String {
    shlex::try_quote(s).map(|c| c.into_owned()).unwrap_or_else(|_| format!("'{}'", s.replace('\0', "")))
}

/// Double quotes where they are safe (matching the documented form),
/// generic shell quoting otherwise.
fn quoted_path(p: &str) -> String {
    let plain = p
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || "_[]:,.-".contains(c));
    if plain {
        format!("\"{p}\"")
    } else {
        shell_word(p)
    }
}

/// Text that re-runs `selection` against the same catalog.
pub fn emit_property_snippet(
    selection: &PropertySelection,
    dialect: SnippetDialect,
) -> Result<String, SnippetError> {
    if selection.is_empty() {
        return Err(SnippetError::EmptySelection);
    }
    match dialect {
        SnippetDialect::WorkbenchCli => {
            let mut out = format!("qcwb machines select {}", shell_word(&selection.machine));
            for e in &selection.entries {
                let _ = write!(out, " --path {}", quoted_path(&e.path));
            }
            Ok(out)
        }
        SnippetDialect::Qiskit => Ok(qiskit_properties(selection)),
        SnippetDialect::Openqasm2 => Err(SnippetError::Unsupported {
            dialect,
            what: "a property selection",
        }),
    }
}

fn qiskit_expr(path: &PropertyPath) -> String {
    match path {
        PropertyPath::Qubit { index, field } => match field {
            QubitField::T1Us => format!("props.t1({index}) * 1e6"),
            QubitField::T2Us => format!("props.t2({index}) * 1e6"),
            QubitField::FrequencyGhz => format!("props.frequency({index}) / 1e9"),
            QubitField::ReadoutError => format!("props.readout_error({index})"),
        },
        PropertyPath::Gate { kind, qubits, field } => {
            let qs: Vec<String> = qubits.iter().map(ToString::to_string).collect();
            match field {
                GateField::Error => format!("props.gate_error(\"{kind}\", [{}])", qs.join(", ")),
                GateField::DurationNs => {
                    format!("props.gate_length(\"{kind}\", [{}]) * 1e9", qs.join(", "))
                }
            }
        }
        PropertyPath::Status(StatusField::Operational) => "backend.status().operational".into(),
        PropertyPath::Status(StatusField::PendingJobs) => "backend.status().pending_jobs".into(),
        PropertyPath::Status(StatusField::LastCalibrated) => "props.last_update_date.isoformat()".into(),
        PropertyPath::CouplingMap => "backend.configuration().coupling_map".into(),
        PropertyPath::Name => "backend.name".into(),
        PropertyPath::NQubits => "backend.configuration().n_qubits".into(),
        PropertyPath::BasisGates => "backend.configuration().basis_gates".into(),
    }
}

fn qiskit_properties(selection: &PropertySelection) -> String {
    let name = serde_json::to_string(&selection.machine).expect("string");
    let mut out = String::from("from qiskit_ibm_runtime import QiskitRuntimeService\n\n");
    let _ = writeln!(out, "backend = QiskitRuntimeService().backend({name})");
    out.push_str("props = backend.properties()\n\nselection = {\n");
    for e in &selection.entries {
        let key = serde_json::to_string(&e.path).expect("string");
        match e.path.parse::<PropertyPath>() {
            Ok(p) => {
                let _ = writeln!(out, "    {key}: {},", qiskit_expr(&p));
            }
            Err(_) => {
                let _ = writeln!(out, "    # {key}: not expressible");
            }
        }
    }
    out.push_str("}\nprint(selection)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate_machine, Topology};

    fn machine() -> MachineProperties {
        let mut m = generate_machine(7, 3, Topology::Line, 1.0).unwrap();
        m.qubits[0].t1_us = 120.5;
        m
    }

    #[test]
    fn qubit_lookup_with_unit() {
        let s = select_properties(&machine(), &["qubits[0].t1_us"]);
        assert_eq!(s.entries[0].value, Some(json!(120.5)));
        assert_eq!(s.entries[0].unit.as_deref(), Some("µs"));
    }

    #[test]
    fn gate_lookup() {
        let m = machine();
        let want = m.gates.iter().find(|g| g.kind == "cx" && g.qubits == [0, 1]).unwrap().error;
        let s = select_properties(&m, &["gates[cx:0,1].error"]);
        assert_eq!(s.entries[0].value, Some(json!(want)));
    }

    #[test]
    fn per_entry_errors_keep_order() {
        let s = select_properties(
            &machine(),
            &["qubits[99].t1_us", "name", "qubits[0].colour", "gates[cx:0,2].error", "status.pending_jobs"],
        );
        assert_eq!(s.entries.len(), 5);
        assert!(s.entries[0].error.as_deref().unwrap().contains("index out of range"));
        assert_eq!(s.entries[1].value, Some(json!("synthetic_line_3q_s7")));
        assert!(s.entries[2].error.as_deref().unwrap().contains("unknown qubit field"));
        assert!(s.entries[3].error.as_deref().unwrap().contains("no gate entry"));
        assert!(s.entries[4].value.is_some());
    }

    #[test]
    fn path_display_round_trips() {
        for p in [
            "qubits[2].frequency_ghz",
            "gates[sx:1].duration_ns",
            "gates[cx:2,1].error",
            "status.last_calibrated",
            "coupling_map",
            "basis_gates",
            "n_qubits",
        ] {
            assert_eq!(p.parse::<PropertyPath>().unwrap().to_string(), p);
        }
        assert!("qubits[x].t1_us".parse::<PropertyPath>().is_err());
        assert!("gates[cx].error".parse::<PropertyPath>().is_err());
        assert!("status.mood".parse::<PropertyPath>().is_err());
    }

    #[test]
    fn cli_snippet_forms() {
        let m = machine();
        let one = select_properties(&m, &["qubits[0].t1_us"]);
        assert_eq!(
            emit_property_snippet(&one, SnippetDialect::WorkbenchCli).unwrap(),
            "qcwb machines select synthetic_line_3q_s7 --path \"qubits[0].t1_us\""
        );
        let two = select_properties(&m, &["gates[cx:0,1].error", "qubits[1].t2_us"]);
        let text = emit_property_snippet(&two, SnippetDialect::WorkbenchCli).unwrap();
        assert!(text.ends_with("--path \"gates[cx:0,1].error\" --path \"qubits[1].t2_us\""));
        assert_eq!(text, emit_property_snippet(&two, SnippetDialect::WorkbenchCli).unwrap());
    }

    #[test]
    fn snippet_quoting_is_shell_safe() {
        let mut m = machine();
        m.name = "my machine".into();
        let s = select_properties(&m, &["it's bad"]);
        let text = emit_property_snippet(&s, SnippetDialect::WorkbenchCli).unwrap();
        let words = shlex::split(&text).unwrap();
        assert_eq!(words, ["qcwb", "machines", "select", "my machine", "--path", "it's bad"]);
    }

    #[test]
    fn snippet_dialect_rules() {
        let empty = PropertySelection {
            machine: "x".into(),
            entries: vec![],
        };
        assert_eq!(
            emit_property_snippet(&empty, SnippetDialect::WorkbenchCli),
            Err(SnippetError::EmptySelection)
        );
        let s = select_properties(&machine(), &["qubits[0].t1_us", "gates[cx:0,1].duration_ns"]);
        assert!(emit_property_snippet(&s, SnippetDialect::Openqasm2).is_err());
        let py = emit_property_snippet(&s, SnippetDialect::Qiskit).unwrap();
        assert!(py.contains("\"qubits[0].t1_us\": props.t1(0) * 1e6,"));
        assert!(py.contains("props.gate_length(\"cx\", [0, 1]) * 1e9"));
    }
}
