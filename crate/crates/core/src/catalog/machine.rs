use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostic, Diagnostics};

pub const MACHINE_FILE_SUFFIX: &str = ".machine.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineStatus {
    pub operational: bool,
    pub pending_jobs: u64,
    /// ISO-8601 / RFC 3339 timestamp.
    pub last_calibrated: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitProperties {
    pub t1_us: f64,
    pub t2_us: f64,
    pub frequency_ghz: f64,
    pub readout_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateProperties {
    pub kind: String,
    pub qubits: Vec<usize>,
    pub error: f64,
    pub duration_ns: f64,
}

/// Calibration snapshot of one machine, in the `*.machine.json` schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineProperties {
    pub name: String,
    pub n_qubits: usize,
    pub status: MachineStatus,
    pub coupling_map: Vec<(usize, usize)>,
    pub qubits: Vec<QubitProperties>,
    pub gates: Vec<GateProperties>,
    pub basis_gates: Vec<String>,
}

impl MachineProperties {
    /// Gate entry for `kind` on exactly `qubits`; a two-qubit lookup falls back
    /// to the reversed pair when only one direction is calibrated.
    pub fn gate_entry(&self, kind: &str, qubits: &[usize]) -> Option<&GateProperties> {
        let exact = self
            .gates
            .iter()
            .find(|g| g.kind == kind && g.qubits == qubits);
        exact.or_else(|| {
            if qubits.len() != 2 {
                return None;
            }
            let rev = [qubits[1], qubits[0]];
            self.gates.iter().find(|g| g.kind == kind && g.qubits == rev)
        })
    }

    pub fn readout_error(&self, qubit: usize) -> Option<f64> {
        self.qubits.get(qubit).map(|q| q.readout_error)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.coupling_map.contains(&(a, b))
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Sorted undirected neighbor lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n_qubits];
        for &(a, b) in &self.coupling_map {
            if a < self.n_qubits && b < self.n_qubits && a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Adds the reverse of every coupling pair, then sorts and dedups.
    pub fn normalize_coupling(&mut self) {
        let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(a, b) in &self.coupling_map {
            set.insert((a, b));
            set.insert((b, a));
        }
        self.coupling_map = set.into_iter().collect();
    }

    pub fn mean_gate_error(&self) -> f64 {
        if self.gates.is_empty() {
            return 0.0;
        }
        self.gates.iter().map(|g| g.error).sum::<f64>() / self.gates.len() as f64
    }

    /// Hard violations are errors, the `t2 <= 2 t1` bound is a warning.
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::new();
        let mut err = |msg: String| d.push(Diagnostic::error("machine", msg));
        let n = self.n_qubits;
        if self.name.trim().is_empty() {
            err("machine name must not be empty".into());
        }
        if n == 0 {
            err("machine must have at least one qubit".into());
        }
        if self.qubits.len() != n {
            err(format!(
                "qubit table has {} entries but n_qubits = {n}",
                self.qubits.len()
            ));
        }
        if chrono::DateTime::parse_from_rfc3339(&self.status.last_calibrated).is_err() {
            err(format!(
                "status.last_calibrated '{}' is not an ISO-8601 timestamp",
                self.status.last_calibrated
            ));
        }
        for &(a, b) in &self.coupling_map {
            if a >= n || b >= n {
                err(format!("coupling pair ({a},{b}) index out of range for {n} qubits"));
            } else if a == b {
                err(format!("coupling pair ({a},{b}) is a self-loop"));
            }
        }
        let mut warnings = Vec::new();
        for (i, q) in self.qubits.iter().enumerate() {
            if !(0.0..=1.0).contains(&q.readout_error) {
                err(format!(
                    "probability out of range: qubits[{i}].readout_error = {}",
                    q.readout_error
                ));
            }
            for (field, v) in [("t1_us", q.t1_us), ("t2_us", q.t2_us), ("frequency_ghz", q.frequency_ghz)] {
                if !(v > 0.0 && v.is_finite()) {
                    err(format!("qubits[{i}].{field} must be positive, got {v}"));
                }
            }
            if q.t2_us > 2.0 * q.t1_us {
                warnings.push(format!(
                    "qubits[{i}]: t2_us = {} exceeds 2 * t1_us = {}",
                    q.t2_us,
                    2.0 * q.t1_us
                ));
            }
        }
        let basis: BTreeSet<&str> = self.basis_gates.iter().map(String::as_str).collect();
        for (i, g) in self.gates.iter().enumerate() {
            if !(0.0..=1.0).contains(&g.error) {
                err(format!("probability out of range: gates[{i}].error = {}", g.error));
            }
            if !(g.duration_ns >= 0.0 && g.duration_ns.is_finite()) {
                err(format!("gates[{i}].duration_ns must be non-negative, got {}", g.duration_ns));
            }
            if g.qubits.is_empty() {
                err(format!("gates[{i}] has no qubits"));
            }
            for &q in &g.qubits {
                if q >= n {
                    err(format!("gates[{i}] qubit {q} index out of range for {n} qubits"));
                }
            }
            if g.qubits.len() == 2
                && basis.contains(g.kind.as_str())
                && !self.coupling_map.contains(&(g.qubits[0], g.qubits[1]))
            {
                err(format!(
                    "gates[{i}] {} on ({},{}) is not in the coupling map",
                    g.kind, g.qubits[0], g.qubits[1]
                ));
            }
        }
        for w in warnings {
            d.push(Diagnostic::warning("machine_t2", w));
        }
        d
    }
}

/// Parses a machine document, expands undirected coupling pairs and validates it.
pub fn parse_machine(text: &str) -> Result<(MachineProperties, Diagnostics), Diagnostics> {
    let mut m: MachineProperties = serde_json::from_str(text)
        .map_err(|e| Diagnostics::from(Diagnostic::error("schema", format!("schema violation: {e}"))))?;
    m.normalize_coupling();
    let d = m.validate();
    if d.has_errors() {
        Err(d)
    } else {
        Ok((m, d))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read catalog directory {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown machine '{0}'")]
    UnknownMachine(String),
}

/// Outcome of loading one file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileReport {
    pub path: PathBuf,
    pub loaded: bool,
    pub diagnostics: Diagnostics,
}

/// Machines by name plus per-file load findings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    machines: BTreeMap<String, MachineProperties>,
    pub reports: Vec<FileReport>,
}

impl Catalog {
    pub fn from_machines(machines: impl IntoIterator<Item = MachineProperties>) -> Self {
        Self {
            machines: machines.into_iter().map(|m| (m.name.clone(), m)).collect(),
            reports: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.machines.is_empty()
    }

    pub fn get(&self, name: &str) -> Result<&MachineProperties, CatalogError> {
        self.machines
            .get(name)
            .ok_or_else(|| CatalogError::UnknownMachine(name.to_string()))
    }

    pub fn machines(&self) -> impl Iterator<Item = &MachineProperties> {
        self.machines.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.machines.keys().map(String::as_str)
    }

    /// Adds a validated machine; rejects duplicates and invalid data.
    pub fn insert(&mut self, mut machine: MachineProperties) -> Result<(), Diagnostics> {
        machine.normalize_coupling();
        let d = machine.validate();
        if d.has_errors() {
            return Err(d);
        }
        if self.machines.contains_key(&machine.name) {
            return Err(Diagnostic::error(
                "duplicate_machine",
                format!("duplicate machine name '{}'", machine.name),
            )
            .into());
        }
        self.machines.insert(machine.name.clone(), machine);
        Ok(())
    }

    pub fn rejected(&self) -> impl Iterator<Item = &FileReport> {
        self.reports.iter().filter(|r| !r.loaded)
    }
}

/// Loads every `*.machine.json` in `dir` (non-recursive, sorted by file name).
pub fn load_catalog(dir: &Path) -> Result<Catalog, CatalogError> {
    let unreadable = |source| CatalogError::Unreadable {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(unreadable)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(MACHINE_FILE_SUFFIX))
        })
        .collect();
    paths.sort();

    let mut catalog = Catalog::default();
    for path in paths {
        let parsed = fs::read_to_string(&path)
            .map_err(|e| Diagnostics::from(Diagnostic::error("io", format!("cannot read file: {e}"))))
            .and_then(|text| parse_machine(&text));
        let report = match parsed {
            Ok((machine, warnings)) => match catalog.insert(machine) {
                Ok(()) => FileReport {
                    path,
                    loaded: true,
                    diagnostics: warnings,
                },
                Err(d) => FileReport {
                    path,
                    loaded: false,
                    diagnostics: d,
                },
            },
            Err(d) => FileReport {
                path,
                loaded: false,
                diagnostics: d,
            },
        };
        catalog.reports.push(report);
    }
    Ok(catalog)
}

/// Writes `machine` as `<dir>/<name>.machine.json`, pretty-printed.
pub fn write_machine(dir: &Path, machine: &MachineProperties) -> std::io::Result<PathBuf> {
    let path = dir.join(format!("{}{MACHINE_FILE_SUFFIX}", machine.name));
    let text = serde_json::to_string_pretty(machine).expect("machine serializes");
    fs::write(&path, text + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate_machine, Topology};

    fn machine() -> MachineProperties {
        generate_machine(7, 3, Topology::Line, 1.0).unwrap()
    }

    #[test]
    fn generated_machine_is_valid() {
        assert!(machine().validate().is_empty());
    }

    #[test]
    fn readout_out_of_range_rejected() {
        let mut m = machine();
        m.qubits[1].readout_error = 1.7;
        let text = serde_json::to_string(&m).unwrap();
        let d = parse_machine(&text).unwrap_err();
        assert!(d.mentions("probability out of range"));
    }

    #[test]
    fn t2_bound_is_a_warning() {
        let mut m = machine();
        m.qubits[0].t2_us = 3.0 * m.qubits[0].t1_us;
        let (_, d) = parse_machine(&serde_json::to_string(&m).unwrap()).unwrap();
        assert!(!d.has_errors());
        assert_eq!(d.warnings().count(), 1);
    }

    #[test]
    fn undirected_pairs_expanded() {
        let mut m = machine();
        m.coupling_map = vec![(0, 1), (2, 1)];
        let (m, _) = parse_machine(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m.coupling_map, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn index_and_coupling_violations() {
        let mut m = machine();
        m.coupling_map.push((0, 9));
        assert!(m.validate().mentions("index out of range"));
        let mut m = machine();
        m.coupling_map.retain(|&(a, b)| (a, b) != (1, 2) && (a, b) != (2, 1));
        assert!(m.validate().mentions("not in the coupling map"));
        let mut m = machine();
        m.status.last_calibrated = "yesterday".into();
        assert!(m.validate().mentions("ISO-8601"));
    }

    #[test]
    fn gate_entry_falls_back_to_reverse() {
        let mut m = machine();
        m.gates.retain(|g| !(g.kind == "cx" && g.qubits == vec![1, 0]));
        let fwd = m.gate_entry("cx", &[0, 1]).unwrap().error;
        assert_eq!(m.gate_entry("cx", &[1, 0]).unwrap().error, fwd);
        assert!(m.gate_entry("cx", &[0, 2]).is_none());
    }

    #[test]
    fn load_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_catalog(dir.path()).unwrap().is_empty());

        write_machine(dir.path(), &machine()).unwrap();
        let mut other = generate_machine(8, 4, Topology::Ring, 0.5).unwrap();
        other.name = "ring4".into();
        write_machine(dir.path(), &other).unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let cat = load_catalog(dir.path()).unwrap();
        assert_eq!(cat.len(), 2);
        assert!(cat.get("ring4").is_ok());
        assert!(matches!(cat.get("nosuch"), Err(CatalogError::UnknownMachine(_))));

        let mut bad = machine();
        bad.name = "bad".into();
        bad.qubits[0].readout_error = 1.7;
        fs::write(
            dir.path().join("bad.machine.json"),
            serde_json::to_string(&bad).unwrap(),
        )
        .unwrap();
        fs::write(dir.path().join("junk.machine.json"), "{").unwrap();
        let cat = load_catalog(dir.path()).unwrap();
        assert_eq!(cat.len(), 2);
        let rejected: Vec<_> = cat.rejected().collect();
        assert_eq!(rejected.len(), 2);
        assert!(rejected.iter().any(|r| r.diagnostics.mentions("probability out of range")));
        assert!(rejected.iter().any(|r| r.diagnostics.mentions("schema violation")));
    }

    #[test]
    fn unreadable_directory() {
        assert!(matches!(
            load_catalog(Path::new("/definitely/not/here")),
            Err(CatalogError::Unreadable { .. })
        ));
    }
}
