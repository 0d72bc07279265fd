use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::FRAC_PI_2;

use super::{Layout, Origin, ProvenanceMap, TranspileError};
use crate::catalog::MachineProperties;
use crate::circuit::{Circuit, GateKind, GateOp};

struct Router<'a> {
    machine: &'a MachineProperties,
    neighbors: Vec<Vec<usize>>,
    /// logical -> physical
    l2p: Vec<usize>,
    /// physical -> logical, for every physical qubit (idle ones included)
    p2l: Vec<usize>,
    out: Circuit,
    provenance: ProvenanceMap,
}

impl Router<'_> {
    fn push(&mut self, op: GateOp, origin: Origin) {
        let id = self.out.push_unchecked(op);
        self.provenance.insert(id, origin);
    }

    /// BFS over sorted neighbor lists, so among equally short paths the one
    /// through lower-index qubits wins.
    fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.neighbors.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.neighbors[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Emits a two-qubit basis gate on physical qubits, reversing a CX with
    /// Hadamard conjugation when only the opposite direction is coupled.
    fn two_qubit(&mut self, kind: GateKind, a: usize, b: usize, origin: Origin) {
        if self.machine.has_edge(a, b) {
            self.push(GateOp::new(kind, vec![a, b]), origin);
        } else if kind != GateKind::Cx {
            self.push(GateOp::new(kind, vec![b, a]), origin);
        } else {
            let h = |r: &mut Self, q: usize| {
                r.push(GateOp::rz(FRAC_PI_2, q), origin);
                r.push(GateOp::one(GateKind::Sx, q), origin);
                r.push(GateOp::rz(FRAC_PI_2, q), origin);
            };
            h(self, a);
            h(self, b);
            self.push(GateOp::cx(b, a), origin);
            h(self, a);
            h(self, b);
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.two_qubit(GateKind::Cx, a, b, Origin::Routing);
        self.two_qubit(GateKind::Cx, b, a, Origin::Routing);
        self.two_qubit(GateKind::Cx, a, b, Origin::Routing);
        let (la, lb) = (self.p2l[a], self.p2l[b]);
        self.p2l.swap(a, b);
        self.l2p[la] = b;
        self.l2p[lb] = a;
    }

    /// Moves the lower-index endpoint along a shortest path until adjacent.
    fn bring_together(&mut self, la: usize, lb: usize) -> Result<(), TranspileError> {
        loop {
            let (pa, pb) = (self.l2p[la], self.l2p[lb]);
            if self.machine.is_adjacent(pa, pb) {
                return Ok(());
            }
            let (mover, other) = if pa < pb { (pa, pb) } else { (pb, pa) };
            let path = self
                .shortest_path(mover, other)
                .ok_or(TranspileError::NoRoute { a: pa, b: pb })?;
            self.swap(mover, path[1]);
        }
    }
}

/// Places logical qubit `i` on physical qubit `i` and inserts SWAPs (as three
/// CX each, origin [`Origin::Routing`]) so every two-qubit gate acts on a
/// coupled pair. Input must already be in basis kinds of at most two qubits.
pub fn layout_and_route(
    circuit: &Circuit,
    machine: &MachineProperties,
) -> Result<(Circuit, Layout, ProvenanceMap), TranspileError> {
    let n_phys = machine.n_qubits;
    if circuit.n_qubits > n_phys {
        return Err(TranspileError::TooManyQubits {
            n_qubits: circuit.n_qubits,
            machine: machine.name.clone(),
            available: n_phys,
        });
    }
    // Idle physical qubits are tracked as extra logical indices so SWAPs
    // through them keep both maps consistent.
    let mut r = Router {
        machine,
        neighbors: machine.neighbors(),
        l2p: (0..n_phys).collect(),
        p2l: (0..n_phys).collect(),
        out: Circuit {
            n_qubits: n_phys,
            gates: Vec::new(),
            ..circuit.clone()
        },
        provenance: ProvenanceMap::new(),
    };
    let initial: BTreeMap<usize, usize> = (0..circuit.n_qubits).map(|q| (q, q)).collect();

    for g in &circuit.gates {
        let origin = Origin::Logical(g.id);
        match (g.kind, g.qubits.as_slice()) {
            (GateKind::Barrier, qs) => {
                let mapped = qs.iter().map(|&q| r.l2p[q]).collect();
                r.push(GateOp::new(GateKind::Barrier, mapped), origin);
            }
            (_, [q]) => {
                let mut op = GateOp::from(g);
                op.qubits = vec![r.l2p[*q]];
                r.push(op, origin);
            }
            (kind, [a, b]) => {
                r.bring_together(*a, *b)?;
                let (pa, pb) = (r.l2p[*a], r.l2p[*b]);
                r.two_qubit(kind, pa, pb, origin);
            }
            (kind, qs) => {
                return Err(TranspileError::UnsupportedGate {
                    gate_id: g.id,
                    kind: kind.name().to_string(),
                    n_qubits: qs.len(),
                })
            }
        }
    }
    let final_layout = (0..circuit.n_qubits).map(|q| (q, r.l2p[q])).collect();
    Ok((
        r.out,
        Layout {
            initial,
            final_layout,
        },
        r.provenance,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate_machine, Topology};
    use crate::circuit::unitary::layout_equivalence_distance;
    use crate::circuit::unitary_of;

    fn line3() -> MachineProperties {
        generate_machine(7, 3, Topology::Line, 1.0).unwrap()
    }

    #[test]
    fn far_cx_gets_one_swap() {
        let mut c = Circuit::new(3, 0);
        c.append_gate(GateKind::Cx, &[0, 2], &[]).unwrap();
        let (out, layout, prov) = layout_and_route(&c, &line3()).unwrap();
        let routing = prov.values().filter(|o| **o == Origin::Routing).count();
        assert_eq!(routing, 3);
        let last = out.gates.last().unwrap();
        assert_eq!(last.kind, GateKind::Cx);
        assert!(line3().has_edge(last.qubits[0], last.qubits[1]));
        assert_eq!(layout.final_layout[&0], 1);
        assert_eq!(layout.final_layout[&1], 0);
        // Oracle: dense 8x8 matrices under the two layout permutations.
        let d = layout_equivalence_distance(
            &unitary_of(&c).unwrap(),
            &unitary_of(&out).unwrap(),
            &layout.initial,
            &layout.final_layout,
        );
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn adjacent_cx_untouched() {
        let mut c = Circuit::new(2, 0);
        c.append_gate(GateKind::Cx, &[0, 1], &[]).unwrap();
        let (out, layout, _) = layout_and_route(&c, &line3()).unwrap();
        assert_eq!(out.gates.len(), 1);
        assert_eq!(out.gates[0].qubits, [0, 1]);
        assert_eq!(layout.initial, layout.final_layout);
    }

    #[test]
    fn no_route_without_coupling() {
        let mut m = line3();
        m.coupling_map.clear();
        m.gates.retain(|g| g.qubits.len() == 1);
        let mut c = Circuit::new(2, 0);
        c.append_gate(GateKind::Cx, &[0, 1], &[]).unwrap();
        let err = layout_and_route(&c, &m).unwrap_err();
        assert!(err.to_string().contains("no route"));
    }

    #[test]
    fn one_directional_cx_flipped() {
        let mut m = line3();
        m.coupling_map.retain(|&p| p != (1, 0));
        let mut c = Circuit::new(2, 0);
        c.append_gate(GateKind::Cx, &[1, 0], &[]).unwrap();
        let (out, layout, _) = layout_and_route(&c, &m).unwrap();
        assert!(out
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Cx)
            .all(|g| m.has_edge(g.qubits[0], g.qubits[1])));
        let d = layout_equivalence_distance(
            &unitary_of(&c).unwrap(),
            &unitary_of(&out).unwrap(),
            &layout.initial,
            &layout.final_layout,
        );
        assert!(d < 1e-9);
    }

    #[test]
    fn measure_follows_swaps() {
        let mut c = Circuit::new(3, 1);
        c.append_gate(GateKind::Cx, &[0, 2], &[]).unwrap();
        c.measure(0, 0).unwrap();
        let (out, layout, _) = layout_and_route(&c, &line3()).unwrap();
        let m = out.gates.last().unwrap();
        assert_eq!(m.qubits, [layout.final_layout[&0]]);
        assert_eq!(m.clbits, [0]);
    }

    #[test]
    fn too_wide() {
        let c = Circuit::new(4, 0);
        assert!(matches!(
            layout_and_route(&c, &line3()),
            Err(TranspileError::TooManyQubits { .. })
        ));
    }
}
