#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use qcwb_core::catalog::{generate_machine, MachineProperties, Topology};
use qcwb_core::circuit::{unitary_of, Circuit, GateKind, GateOp};

/// Unitary kinds a random circuit may draw from.
pub const KINDS: [GateKind; 17] = [
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Sx,
    GateKind::Cx,
    GateKind::Cz,
    GateKind::Swap,
    GateKind::Ccx,
    GateKind::Mcx,
];

/// One random gate: kind selector, a qubit permutation seed and an angle.
pub type GateSeed = (usize, u64, f64);

/// Deterministic circuit from seeds; kinds too wide for `n` fall back to H.
pub fn circuit_from_seeds(n: usize, seeds: &[GateSeed]) -> Circuit {
    let mut c = Circuit::new(n, 0);
    for &(k, perm, angle) in seeds {
        let mut kind = KINDS[k % KINDS.len()];
        let width = match kind {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Ccx => 3,
            GateKind::Mcx => 3 + (perm as usize % 2),
            _ => 1,
        };
        if width > n {
            kind = GateKind::H;
        }
        let width = if kind == GateKind::H { 1 } else { width };
        // Partial Fisher-Yates driven by `perm`.
        let mut pool: Vec<usize> = (0..n).collect();
        let mut s = perm;
        let mut qubits = Vec::with_capacity(width);
        for _ in 0..width {
            let i = (s % pool.len() as u64) as usize;
            s = (s / pool.len() as u64) ^ s.rotate_left(17);
            qubits.push(pool.swap_remove(i));
        }
        let params = if kind.param_arity() == 1 { vec![angle] } else { vec![] };
        c.append_op(GateOp::with_params(kind, qubits, params)).unwrap();
    }
    c
}

pub fn machines() -> Vec<MachineProperties> {
    let specs: [(u64, usize, Topology); 10] = [
        (1, 2, Topology::Line),
        (2, 3, Topology::Line),
        (3, 4, Topology::Line),
        (4, 5, Topology::Line),
        (5, 6, Topology::Line),
        (6, 3, Topology::Ring),
        (7, 5, Topology::Ring),
        (8, 6, Topology::Ring),
        (9, 4, Topology::Grid { rows: 2, cols: 2 }),
        (10, 6, Topology::Grid { rows: 2, cols: 3 }),
    ];
    specs
        .into_iter()
        .map(|(s, n, t)| generate_machine(s, n, t, 1.0).unwrap())
        .collect()
}

/// Same gates on a register widened to `n` qubits.
pub fn widened(c: &Circuit, n: usize) -> Circuit {
    let mut w = c.clone();
    w.n_qubits = n;
    w
}

fn place(x: usize, layout: &BTreeMap<usize, usize>) -> usize {
    layout
        .iter()
        .filter(|(l, _)| x >> **l & 1 == 1)
        .map(|(_, p)| 1usize << p)
        .sum()
}

/// Worst deviation between the compiled unitary and the layout-permuted
/// logical unitary, after removing the best global phase. Logical inputs are
/// embedded with unused physical qubits in |0>.
pub fn permuted_distance(
    logical: &Circuit,
    compiled: &Circuit,
    initial: &BTreeMap<usize, usize>,
    final_layout: &BTreeMap<usize, usize>,
) -> f64 {
    let ul = unitary_of(logical).unwrap();
    let uc = unitary_of(compiled).unwrap();
    let ldim = 1usize << logical.n_qubits;
    let pdim = 1usize << compiled.n_qubits;
    let mut pairs: Vec<(Complex64, Complex64)> = Vec::new();
    for x in 0..ldim {
        let col = place(x, initial);
        let mut want = vec![Complex64::new(0.0, 0.0); pdim];
        for y in 0..ldim {
            want[place(y, final_layout)] = ul.get(y, x);
        }
        for (row, w) in want.into_iter().enumerate() {
            pairs.push((uc.get(row, col), w));
        }
    }
    let overlap: Complex64 = pairs.iter().map(|(g, w)| g.conj() * w).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    pairs.iter().map(|(g, w)| (g * phase - w).norm()).fold(0.0, f64::max)
}
