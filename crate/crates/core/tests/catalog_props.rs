use proptest::prelude::*;
use qcwb_core::catalog::{
    emit_property_snippet, generate_machine, load_catalog, select_properties, write_machine, MachineProperties,
    Topology,
};
use qcwb_core::writer::SnippetDialect;
use serde_json::json;

fn topology(i: usize, n: usize) -> Topology {
    match i % 3 {
        0 => Topology::Line,
        1 => Topology::Ring,
        _ if n.is_multiple_of(2) => Topology::Grid { rows: 2, cols: n / 2 },
        _ => Topology::Line,
    }
}

/// Reads a path's value straight from the struct fields.
fn expected(m: &MachineProperties, path: &str) -> Option<serde_json::Value> {
    if let Some(rest) = path.strip_prefix("qubits[") {
        let (i, field) = rest.split_once("].")?;
        let q = m.qubits.get(i.parse::<usize>().ok()?)?;
        return Some(match field {
            "t1_us" => json!(q.t1_us),
            "t2_us" => json!(q.t2_us),
            "frequency_ghz" => json!(q.frequency_ghz),
            "readout_error" => json!(q.readout_error),
            _ => return None,
        });
    }
    if let Some(rest) = path.strip_prefix("gates[") {
        let (sel, field) = rest.split_once("].")?;
        let (kind, qs) = sel.split_once(':')?;
        let qubits: Vec<usize> = qs.split(',').map(|q| q.parse().unwrap()).collect();
        let g = m.gates.iter().find(|g| g.kind == kind && g.qubits == qubits)?;
        return Some(match field {
            "error" => json!(g.error),
            "duration_ns" => json!(g.duration_ns),
            _ => return None,
        });
    }
    Some(match path {
        "name" => json!(m.name),
        "n_qubits" => json!(m.n_qubits),
        "coupling_map" => json!(m.coupling_map),
        "basis_gates" => json!(m.basis_gates),
        "status.operational" => json!(m.status.operational),
        "status.pending_jobs" => json!(m.status.pending_jobs),
        "status.last_calibrated" => json!(m.status.last_calibrated),
        _ => return None,
    })
}

fn random_path(m: &MachineProperties, pick: u64) -> String {
    let fields = ["t1_us", "t2_us", "frequency_ghz", "readout_error"];
    let n = m.n_qubits as u64;
    match pick % 6 {
        0 | 1 => format!("qubits[{}].{}", (pick / 6) % (n + 1), fields[(pick / 60) as usize % 4]),
        2 | 3 => {
            let g = &m.gates[(pick / 6) as usize % m.gates.len()];
            let qs: Vec<String> = g.qubits.iter().map(ToString::to_string).collect();
            let field = if (pick / 7).is_multiple_of(2) { "error" } else { "duration_ns" };
            format!("gates[{}:{}].{field}", g.kind, qs.join(","))
        }
        4 => ["status.operational", "status.pending_jobs", "status.last_calibrated"][(pick / 6) as usize % 3].into(),
        _ => ["name", "coupling_map", "basis_gates", "n_qubits"][(pick / 6) as usize % 4].into(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn selections_match_the_loaded_file(seed in any::<u64>(), n in 2usize..=6, topo in 0usize..3, picks in prop::collection::vec(any::<u64>(), 1..6)) {
        let m = generate_machine(seed, n, topology(topo, n), 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_machine(dir.path(), &m).unwrap();
        let catalog = load_catalog(dir.path()).unwrap();
        let loaded = catalog.get(&m.name).unwrap();
        prop_assert_eq!(loaded, &m);

        let paths: Vec<String> = picks.iter().map(|&p| random_path(&m, p)).collect();
        let sel = select_properties(loaded, &paths);
        prop_assert_eq!(sel.entries.len(), paths.len());
        for (entry, path) in sel.entries.iter().zip(&paths) {
            prop_assert_eq!(&entry.path, path);
            prop_assert_eq!(&entry.value, &expected(&m, path));
        }
        let text = emit_property_snippet(&sel, SnippetDialect::WorkbenchCli).unwrap();
        let words = shlex::split(&text).unwrap();
        let replayed: Vec<&String> = words.iter().skip(5).step_by(2).collect();
        prop_assert_eq!(&words[..4], &["qcwb", "machines", "select", m.name.as_str()]);
        prop_assert_eq!(replayed, paths.iter().collect::<Vec<_>>());
        prop_assert_eq!(text, emit_property_snippet(&sel, SnippetDialect::WorkbenchCli).unwrap());
    }

    #[test]
    fn loaded_machines_respect_hard_invariants(
        seed in any::<u64>(),
        readout in -0.5f64..1.5,
        gate_err in -0.5f64..1.5,
        extra_pair in (0usize..8, 0usize..8),
    ) {
        let mut m = generate_machine(seed, 4, Topology::Line, 1.0).unwrap();
        m.qubits[seed as usize % 4].readout_error = readout;
        let gi = seed as usize % m.gates.len();
        m.gates[gi].error = gate_err;
        m.coupling_map.push(extra_pair);
        let dir = tempfile::tempdir().unwrap();
        write_machine(dir.path(), &m).unwrap();
        let catalog = load_catalog(dir.path()).unwrap();
        for lm in catalog.machines() {
            prop_assert!(lm.qubits.iter().all(|q| (0.0..=1.0).contains(&q.readout_error)));
            prop_assert!(lm.gates.iter().all(|g| (0.0..=1.0).contains(&g.error)));
            prop_assert!(lm.coupling_map.iter().all(|&(a, b)| a < lm.n_qubits && b < lm.n_qubits && a != b));
        }
        prop_assert_eq!(catalog.len() + catalog.rejected().count(), 1);
    }
}

#[test]
fn scale_zero_and_monotone_means() {
    for seed in [7u64, 8, 9] {
        let zero = generate_machine(seed, 5, Topology::Ring, 0.0).unwrap();
        assert!(zero.gates.iter().all(|g| g.error == 0.0));
        let mut last = -1.0;
        for s in [0.0, 0.1, 1.0, 3.0, 30.0, 1e4] {
            let mean = generate_machine(seed, 5, Topology::Ring, s).unwrap().mean_gate_error();
            assert!(mean >= last);
            last = mean;
        }
    }
}
