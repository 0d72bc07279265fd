//! Dense unitary construction. Used as an equivalence oracle by test suites,
//! so it builds every gate from its explicit small matrix and shares no code
//! with the statevector kernels.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Circuit, GateKind};

pub const MAX_UNITARY_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnitaryError {
    #[error("too many qubits for a dense unitary: {0} > {MAX_UNITARY_QUBITS}")]
    TooManyQubits(usize),
    #[error("measurement present (gate {0}); unitary_of needs a measurement-free circuit")]
    MeasurementPresent(usize),
}

/// Row-major `2^n x 2^n` complex matrix; basis index bit `q` is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl UnitaryMatrix {
    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { n_qubits, data }
    }

    pub fn from_rows(n_qubits: usize, data: Vec<Complex64>) -> Self {
        let dim = 1usize << n_qubits;
        assert_eq!(data.len(), dim * dim, "matrix size does not match qubit count");
        Self { n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.n_qubits, rhs.n_qubits);
        let dim = self.dim();
        let mut out = vec![ZERO; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.data[i * dim + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..dim {
                    out[i * dim + j] += a * rhs.data[k * dim + j];
                }
            }
        }
        UnitaryMatrix {
            n_qubits: self.n_qubits,
            data: out,
        }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let dim = self.dim();
        let mut out = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[j * dim + i] = self.data[i * dim + j].conj();
            }
        }
        UnitaryMatrix {
            n_qubits: self.n_qubits,
            data: out,
        }
    }

    /// Largest entry-wise deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mul(&self.adjoint());
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { ONE } else { ZERO };
                worst = worst.max((p.data[i * dim + j] - expect).norm());
            }
        }
        worst
    }

    /// Max entry-wise distance after removing the best single global phase.
    pub fn distance_up_to_phase(&self, other: &UnitaryMatrix) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        phase_aligned_distance(&self.data, &other.data)
    }

    pub fn equivalent_up_to_phase(&self, other: &UnitaryMatrix, tol: f64) -> bool {
        self.distance_up_to_phase(other) <= tol
    }

    /// Applies a `k`-qubit matrix (local bit `i` = `qubits[i]`) on the left.
    fn apply_local(&mut self, local: &[Complex64], qubits: &[usize]) {
        let k = qubits.len();
        let sub = 1usize << k;
        let dim = self.dim();
        let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
        let offsets: Vec<usize> = (0..sub)
            .map(|l| {
                (0..k)
                    .filter(|i| l >> i & 1 == 1)
                    .map(|i| 1usize << qubits[i])
                    .sum()
            })
            .collect();
        let mut gathered = vec![ZERO; sub];
        for col in 0..dim {
            for base in 0..dim {
                if base & mask != 0 {
                    continue;
                }
                for (l, off) in offsets.iter().enumerate() {
                    gathered[l] = self.data[(base | off) * dim + col];
                }
                for (r, off) in offsets.iter().enumerate() {
                    let mut acc = ZERO;
                    for (c, g) in gathered.iter().enumerate() {
                        acc += local[r * sub + c] * g;
                    }
                    self.data[(base | off) * dim + col] = acc;
                }
            }
        }
    }
}

/// Distance between two equally sized vectors/matrices modulo a global phase.
pub fn phase_aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

/// Small matrix of a unitary gate kind over `n_qubits` local qubits.
///
/// Local ordering follows the gate's qubit list: bit `i` of the local index is
/// `qubits[i]`. For controlled kinds the target is the last qubit.
pub fn gate_matrix(kind: GateKind, params: &[f64], n_qubits: usize) -> Option<Vec<Complex64>> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let h = FRAC_1_SQRT_2;
    let m2 = |m: [Complex64; 4]| m.to_vec();
    let one_qubit = match kind {
        GateKind::H => Some(m2([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])),
        GateKind::X => Some(m2([ZERO, ONE, ONE, ZERO])),
        GateKind::Y => Some(m2([ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])),
        GateKind::Z => Some(m2([ONE, ZERO, ZERO, c(-1.0, 0.0)])),
        GateKind::S => Some(m2([ONE, ZERO, ZERO, c(0.0, 1.0)])),
        GateKind::Sdg => Some(m2([ONE, ZERO, ZERO, c(0.0, -1.0)])),
        GateKind::T => Some(m2([ONE, ZERO, ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])),
        GateKind::Tdg => Some(m2([ONE, ZERO, ZERO, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)])),
        GateKind::Sx => Some(m2([c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)])),
        GateKind::Rx => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            Some(m2([c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]))
        }
        GateKind::Ry => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            Some(m2([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]))
        }
        GateKind::Rz => {
            let t = params[0] / 2.0;
            Some(m2([Complex64::from_polar(1.0, -t), ZERO, ZERO, Complex64::from_polar(1.0, t)]))
        }
        _ => None,
    };
    if let Some(m) = one_qubit {
        return (n_qubits == 1).then_some(m);
    }
    let dim = 1usize << n_qubits;
    let mut m = vec![ZERO; dim * dim];
    let target_bit = 1usize << (n_qubits - 1);
    let controls_mask = target_bit - 1;
    match kind {
        GateKind::Cx | GateKind::Ccx | GateKind::Mcx => {
            if (kind == GateKind::Cx && n_qubits != 2) || (kind == GateKind::Ccx && n_qubits != 3) {
                return None;
            }
            for col in 0..dim {
                let row = if col & controls_mask == controls_mask {
                    col ^ target_bit
                } else {
                    col
                };
                m[row * dim + col] = ONE;
            }
        }
        GateKind::Cz => {
            if n_qubits != 2 {
                return None;
            }
            for i in 0..dim {
                m[i * dim + i] = if i == 3 { -ONE } else { ONE };
            }
        }
        GateKind::Swap => {
            if n_qubits != 2 {
                return None;
            }
            for col in 0..dim {
                let row = ((col & 1) << 1) | (col >> 1);
                m[row * dim + col] = ONE;
            }
        }
        _ => return None,
    }
    Some(m)
}

/// Product of gate matrices in circuit order. Barriers are skipped.
pub fn unitary_of(circuit: &Circuit) -> Result<UnitaryMatrix, UnitaryError> {
    if circuit.n_qubits > MAX_UNITARY_QUBITS {
        return Err(UnitaryError::TooManyQubits(circuit.n_qubits));
    }
    if let Some(g) = circuit.gates.iter().find(|g| g.kind == GateKind::Measure) {
        return Err(UnitaryError::MeasurementPresent(g.id));
    }
    let mut u = UnitaryMatrix::identity(circuit.n_qubits);
    for g in &circuit.gates {
        if g.kind == GateKind::Barrier {
            continue;
        }
        let local = gate_matrix(g.kind, &g.params, g.qubits.len())
            .expect("validated gate has a matrix");
        u.apply_local(&local, &g.qubits);
    }
    Ok(u)
}

/// Checks `compiled` against `logical` under the given layouts, up to one global phase.
///
/// Logical basis state `x` is placed on the `initial` physical positions with every
/// other physical qubit in `|0>`; the compiled output must equal `U_logical|x>`
/// placed on the `final` positions. Returns the worst entry-wise deviation.
pub fn layout_equivalence_distance(
    logical: &UnitaryMatrix,
    compiled: &UnitaryMatrix,
    initial: &BTreeMap<usize, usize>,
    final_layout: &BTreeMap<usize, usize>,
) -> f64 {
    let n = logical.n_qubits();
    let place = |x: usize, layout: &BTreeMap<usize, usize>| -> usize {
        (0..n)
            .filter(|q| x >> q & 1 == 1)
            .map(|q| 1usize << layout[&q])
            .sum()
    };
    let ldim = logical.dim();
    let pdim = compiled.dim();
    let mut got = Vec::with_capacity(ldim * pdim);
    let mut want = Vec::with_capacity(ldim * pdim);
    for x in 0..ldim {
        let col = place(x, initial);
        let mut expect = vec![ZERO; pdim];
        for y in 0..ldim {
            expect[place(y, final_layout)] += logical.get(y, x);
        }
        for (row, e) in expect.into_iter().enumerate() {
            got.push(compiled.get(row, col));
            want.push(e);
        }
    }
    phase_aligned_distance(&got, &want)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateOp;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn empty_circuit_is_identity() {
        let u = unitary_of(&Circuit::new(1, 0)).unwrap();
        assert_eq!(u, UnitaryMatrix::identity(1));
    }

    #[test]
    fn single_x() {
        let mut c = Circuit::new(1, 0);
        c.append_gate(GateKind::X, &[0], &[]).unwrap();
        let u = unitary_of(&c).unwrap();
        assert!(close(u.get(0, 1), ONE) && close(u.get(1, 0), ONE));
        assert!(close(u.get(0, 0), ZERO) && close(u.get(1, 1), ZERO));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn hh_is_identity() {
        // Oracle: explicit 2x2 product of the Hadamard matrix with itself.
        let h = FRAC_1_SQRT_2;
        let hm = [[h, h], [h, -h]];
        let mut prod = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    prod[i][j] += hm[i][k] * hm[k][j];
                }
            }
        }
        let mut c = Circuit::new(1, 0);
        c.append_gate(GateKind::H, &[0], &[]).unwrap();
        c.append_gate(GateKind::H, &[0], &[]).unwrap();
        let u = unitary_of(&c).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((u.get(i, j) - Complex64::new(prod[i][j], 0.0)).norm() < 1e-10);
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((u.get(i, j).re - id).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cx_control_is_first_qubit() {
        let mut c = Circuit::new(2, 0);
        c.append_gate(GateKind::Cx, &[0, 1], &[]).unwrap();
        let u = unitary_of(&c).unwrap();
        // |q1 q0> = |01> (index 1) -> |11> (index 3)
        assert!(close(u.get(3, 1), ONE));
        assert!(close(u.get(2, 2), ONE));
    }

    #[test]
    fn rejects_measurement_and_size() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0).unwrap();
        assert_eq!(unitary_of(&c), Err(UnitaryError::MeasurementPresent(0)));
        assert!(matches!(
            unitary_of(&Circuit::new(11, 0)),
            Err(UnitaryError::TooManyQubits(11))
        ));
    }

    #[test]
    fn barrier_is_ignored() {
        let mut c = Circuit::new(2, 0);
        c.append_gate(GateKind::Barrier, &[], &[]).unwrap();
        assert_eq!(unitary_of(&c).unwrap(), UnitaryMatrix::identity(2));
    }

    #[test]
    fn all_gate_matrices_are_unitary() {
        for kind in GateKind::ALL.into_iter().filter(|k| k.is_unitary()) {
            let arity = match kind.qubit_arity() {
                crate::circuit::QubitArity::Exactly(k) => k,
                _ => 4,
            };
            let params = vec![0.37; kind.param_arity()];
            let mut c = Circuit::new(arity, 0);
            c.push_unchecked(GateOp::with_params(kind, (0..arity).collect(), params));
            let u = unitary_of(&c).unwrap();
            assert!(u.unitarity_defect() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = UnitaryMatrix::identity(1);
        let b = UnitaryMatrix::from_rows(1, vec![-ONE, ZERO, ZERO, -ONE]);
        assert!(a.equivalent_up_to_phase(&b, 1e-12));
        let z = UnitaryMatrix::from_rows(1, vec![ONE, ZERO, ZERO, -ONE]);
        assert!(!a.equivalent_up_to_phase(&z, 1e-3));
    }
}
