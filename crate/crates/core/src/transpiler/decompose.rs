//! Rewriting of arbitrary logical gates into {rz, sx, x, cx}.
//!
//! One-qubit gates go through a ZYZ Euler decomposition realized as
//! `RZ SX RZ SX RZ`. Controlled rotations use the A·X·B·X·C construction and
//! multi-controlled X recurses on square roots of the target operation, so no
//! ancilla qubits are needed.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::{Origin, ProvenanceMap, TranspileError};
use crate::circuit::{unitary::gate_matrix, Circuit, GateInstance, GateKind, GateOp};

/// Kinds every target basis must contain.
pub const REQUIRED_BASIS: [GateKind; 4] = [GateKind::Rz, GateKind::Sx, GateKind::X, GateKind::Cx];

type Mat2 = [Complex64; 4];

const I2: Mat2 = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(1.0, 0.0),
];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn adjoint(a: &Mat2) -> Mat2 {
    [a[0].conj(), a[2].conj(), a[1].conj(), a[3].conj()]
}

fn rz_mat(t: f64) -> Mat2 {
    let z = Complex64::new(0.0, 0.0);
    [Complex64::from_polar(1.0, -t / 2.0), z, z, Complex64::from_polar(1.0, t / 2.0)]
}

fn ry_mat(t: f64) -> Mat2 {
    let (s, c) = (t / 2.0).sin_cos();
    let r = |x: f64| Complex64::new(x, 0.0);
    [r(c), r(-s), r(s), r(c)]
}

/// `(alpha, phi, theta, lambda)` with `U = e^{i alpha} RZ(phi) RY(theta) RZ(lambda)`.
fn zyz(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u[0] * u[3] - u[1] * u[2];
    let alpha = det.arg() / 2.0;
    let phase = Complex64::from_polar(1.0, -alpha);
    let (a, b) = (u[0] * phase, u[2] * phase);
    let theta = 2.0 * b.norm().atan2(a.norm());
    let sum = if a.norm() > 1e-12 { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-12 { 2.0 * b.arg() } else { 0.0 };
    (alpha, (sum + diff) / 2.0, theta, (sum - diff) / 2.0)
}

/// Principal square root of a 2x2 unitary.
fn sqrt2(m: &Mat2) -> Mat2 {
    let det = m[0] * m[3] - m[1] * m[2];
    let tr = m[0] + m[3];
    let s0 = det.sqrt();
    let s = if (tr + 2.0 * s0).norm() >= (tr - 2.0 * s0).norm() { s0 } else { -s0 };
    let t = (tr + 2.0 * s).sqrt();
    [(m[0] + s) / t, m[1] / t, m[2] / t, (m[3] + s) / t]
}

/// Wraps into (-pi, pi]; a 2*pi shift of an RZ angle is only a global sign.
fn wrap(t: f64) -> f64 {
    let mut w = t.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

struct Emitter {
    out: Vec<GateOp>,
}

impl Emitter {
    fn rz(&mut self, t: f64, q: usize) {
        self.out.push(GateOp::rz(wrap(t), q));
    }

    fn sx(&mut self, q: usize) {
        self.out.push(GateOp::one(GateKind::Sx, q));
    }

    fn cx(&mut self, c: usize, t: usize) {
        self.out.push(GateOp::cx(c, t));
    }

    fn h(&mut self, q: usize) {
        self.rz(FRAC_PI_2, q);
        self.sx(q);
        self.rz(FRAC_PI_2, q);
    }

    /// Any one-qubit unitary, as `RZ(l) SX RZ(t+pi) SX RZ(p+pi)` in time order.
    fn single(&mut self, u: &Mat2, q: usize) {
        let (_, phi, theta, lambda) = zyz(u);
        self.rz(lambda, q);
        self.sx(q);
        self.rz(theta + PI, q);
        self.sx(q);
        self.rz(phi + PI, q);
    }

    /// Controlled-U with one control, up to global phase.
    fn controlled(&mut self, u: &Mat2, c: usize, t: usize) {
        let (alpha, phi, theta, lambda) = zyz(u);
        let a = mat_mul(&rz_mat(phi), &ry_mat(theta / 2.0));
        let b = mat_mul(&ry_mat(-theta / 2.0), &rz_mat(-(phi + lambda) / 2.0));
        let cm = rz_mat((lambda - phi) / 2.0);
        self.single(&cm, t);
        self.cx(c, t);
        self.single(&b, t);
        self.cx(c, t);
        self.single(&a, t);
        // Relative phase e^{i alpha} on the control's |1> branch.
        self.rz(alpha, c);
    }

    fn ccx(&mut self, a: usize, b: usize, c: usize) {
        self.h(c);
        self.cx(b, c);
        self.rz(-FRAC_PI_4, c);
        self.cx(a, c);
        self.rz(FRAC_PI_4, c);
        self.cx(b, c);
        self.rz(-FRAC_PI_4, c);
        self.cx(a, c);
        self.rz(FRAC_PI_4, b);
        self.rz(FRAC_PI_4, c);
        self.h(c);
        self.cx(a, b);
        self.rz(FRAC_PI_4, a);
        self.rz(-FRAC_PI_4, b);
        self.cx(a, b);
    }

    fn mcx(&mut self, controls: &[usize], t: usize) {
        match controls {
            [] => self.out.push(GateOp::one(GateKind::X, t)),
            [c] => self.cx(*c, t),
            [a, b] => self.ccx(*a, *b, t),
            _ => {
                let x = [I2[1], I2[0], I2[0], I2[1]];
                self.multi_controlled(&x, controls, t);
            }
        }
    }

    /// `C^k(U)` via `V = sqrt(U)`:
    /// `C_last(V) · C^{k-1}X(-> last) · C_last(V†) · C^{k-1}X(-> last) · C^{k-1}(V)`.
    fn multi_controlled(&mut self, u: &Mat2, controls: &[usize], t: usize) {
        match controls {
            [] => self.single(u, t),
            [c] => self.controlled(u, *c, t),
            _ => {
                let (&last, rest) = controls.split_last().expect("non-empty");
                let v = sqrt2(u);
                self.controlled(&v, last, t);
                self.mcx(rest, last);
                self.controlled(&adjoint(&v), last, t);
                self.mcx(rest, last);
                self.multi_controlled(&v, rest, t);
            }
        }
    }

    fn gate(&mut self, g: &GateInstance) {
        let q = &g.qubits;
        match g.kind {
            GateKind::H => self.h(q[0]),
            GateKind::Y => {
                self.rz(PI, q[0]);
                self.out.push(GateOp::one(GateKind::X, q[0]));
            }
            GateKind::Z => self.rz(PI, q[0]),
            GateKind::S => self.rz(FRAC_PI_2, q[0]),
            GateKind::Sdg => self.rz(-FRAC_PI_2, q[0]),
            GateKind::T => self.rz(FRAC_PI_4, q[0]),
            GateKind::Tdg => self.rz(-FRAC_PI_4, q[0]),
            GateKind::X => self.out.push(GateOp::one(GateKind::X, q[0])),
            GateKind::Sx => self.sx(q[0]),
            GateKind::Rz => self.out.push(GateOp::rz(g.params[0], q[0])),
            GateKind::Rx | GateKind::Ry => {
                let m = gate_matrix(g.kind, &g.params, 1).expect("one-qubit matrix");
                self.single(&[m[0], m[1], m[2], m[3]], q[0]);
            }
            GateKind::Cx => self.cx(q[0], q[1]),
            GateKind::Cz => {
                self.h(q[1]);
                self.cx(q[0], q[1]);
                self.h(q[1]);
            }
            GateKind::Swap => {
                self.cx(q[0], q[1]);
                self.cx(q[1], q[0]);
                self.cx(q[0], q[1]);
            }
            GateKind::Ccx => self.ccx(q[0], q[1], q[2]),
            GateKind::Mcx => {
                let (t, controls) = q.split_last().expect("mcx has qubits");
                self.mcx(controls, *t);
            }
            GateKind::Barrier | GateKind::Measure => self.out.push(GateOp::from(g)),
        }
    }
}

/// Basis-gate rewrite of a single gate; kinds already in `basis` pass through.
pub fn decompose_gate(g: &GateInstance, basis: &BTreeSet<GateKind>) -> Vec<GateOp> {
    let passthrough = !g.kind.is_unitary() || (basis.contains(&g.kind) && g.qubits.len() <= 2);
    if passthrough {
        return vec![GateOp::from(g)];
    }
    let mut e = Emitter { out: Vec::new() };
    e.gate(g);
    e.out
}

pub(crate) fn check_basis(basis: &BTreeSet<GateKind>) -> Result<(), TranspileError> {
    let missing: Vec<String> = REQUIRED_BASIS
        .iter()
        .filter(|k| !basis.contains(k))
        .map(|k| k.name().to_string())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(TranspileError::BasisMissing(missing))
    }
}

/// Rewrites `circuit` into `basis` kinds (plus measure and barrier).
///
/// Output gate ids are fresh (0-based); provenance maps each to the id of
/// the source gate in `circuit`.
pub fn decompose_to_basis(
    circuit: &Circuit,
    basis: &BTreeSet<GateKind>,
) -> Result<(Circuit, ProvenanceMap), TranspileError> {
    check_basis(basis)?;
    let mut out = Circuit {
        gates: Vec::new(),
        ..circuit.clone()
    };
    let mut provenance = ProvenanceMap::new();
    for g in &circuit.gates {
        for op in decompose_gate(g, basis) {
            let id = out.push_unchecked(op);
            provenance.insert(id, Origin::Logical(g.id));
        }
    }
    Ok((out, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitary_of;

    fn basis() -> BTreeSet<GateKind> {
        REQUIRED_BASIS.into_iter().collect()
    }

    fn single(kind: GateKind, qubits: &[usize], params: &[f64], n: usize) -> Circuit {
        let mut c = Circuit::new(n, 0);
        c.append_gate(kind, qubits, params).unwrap();
        c
    }

    /// Oracle: dense matrix of the source gate vs dense product of the output.
    fn assert_equivalent(c: &Circuit) {
        let (d, prov) = decompose_to_basis(c, &basis()).unwrap();
        assert!(d.gates.iter().all(|g| basis().contains(&g.kind)), "{:?}", d.gates);
        assert_eq!(prov.len(), d.gates.len());
        let (a, b) = (unitary_of(c).unwrap(), unitary_of(&d).unwrap());
        assert!(a.equivalent_up_to_phase(&b, 1e-9), "{:?}: {}", c.gates[0].kind, a.distance_up_to_phase(&b));
    }

    #[test]
    fn hadamard_form() {
        let c = single(GateKind::H, &[0], &[], 1);
        let (d, _) = decompose_to_basis(&c, &basis()).unwrap();
        let kinds: Vec<_> = d.gates.iter().map(|g| g.kind).collect();
        assert_eq!(kinds, [GateKind::Rz, GateKind::Sx, GateKind::Rz]);
        assert_eq!(d.gates[0].params, [FRAC_PI_2]);
        // Explicit 2x2 product RZ(pi/2) * SX * RZ(pi/2), compared with H.
        let r = rz_mat(FRAC_PI_2);
        let sx = [
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, -0.5),
            Complex64::new(0.5, -0.5),
            Complex64::new(0.5, 0.5),
        ];
        let p = mat_mul(&r, &mat_mul(&sx, &r));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ph = p[0] / h;
        for (got, want) in p.iter().zip([h, h, h, -h]) {
            assert!((got - ph * want).norm() < 1e-12);
        }
        assert_equivalent(&c);
    }

    #[test]
    fn swap_is_three_cx() {
        let c = single(GateKind::Swap, &[0, 1], &[], 2);
        let (d, _) = decompose_to_basis(&c, &basis()).unwrap();
        let pairs: Vec<_> = d.gates.iter().map(|g| (g.kind, g.qubits.clone())).collect();
        assert_eq!(
            pairs,
            [(GateKind::Cx, vec![0, 1]), (GateKind::Cx, vec![1, 0]), (GateKind::Cx, vec![0, 1])]
        );
        assert_equivalent(&c);
    }

    #[test]
    fn rz_unchanged() {
        let c = single(GateKind::Rz, &[0], &[0.3], 1);
        let (d, prov) = decompose_to_basis(&c, &basis()).unwrap();
        assert_eq!(d.gates, c.gates);
        assert_eq!(prov[&0], Origin::Logical(0));
    }

    #[test]
    fn every_kind_equivalent() {
        for kind in GateKind::ALL.into_iter().filter(|k| k.is_unitary()) {
            let params: Vec<f64> = (0..kind.param_arity()).map(|i| 0.7 + i as f64).collect();
            let qubits: Vec<usize> = match kind.qubit_arity() {
                crate::circuit::QubitArity::Exactly(n) => (0..n).rev().collect(),
                _ => vec![1, 3, 0, 2],
            };
            assert_equivalent(&single(kind, &qubits, &params, 4));
        }
    }

    #[test]
    fn wide_mcx() {
        for k in 3..=5 {
            let qubits: Vec<usize> = (0..=k).collect();
            assert_equivalent(&single(GateKind::Mcx, &qubits, &[], k + 1));
        }
    }

    #[test]
    fn rotations_at_special_angles() {
        for kind in [GateKind::Rx, GateKind::Ry] {
            for t in [0.0, PI, -PI, FRAC_PI_2, 2.0 * PI, 1e-9, 3.0] {
                assert_equivalent(&single(kind, &[0], &[t], 1));
            }
        }
    }

    #[test]
    fn missing_basis_rejected() {
        let b: BTreeSet<_> = [GateKind::Rz, GateKind::Cx].into_iter().collect();
        let err = decompose_to_basis(&Circuit::new(1, 0), &b).unwrap_err();
        assert!(err.to_string().contains("sx"));
    }

    #[test]
    fn measure_and_barrier_pass_through() {
        let mut c = Circuit::new(2, 2);
        c.append_gate(GateKind::H, &[0], &[]).unwrap();
        c.append_gate(GateKind::Barrier, &[], &[]).unwrap();
        c.measure(0, 1).unwrap();
        let (d, prov) = decompose_to_basis(&c, &basis()).unwrap();
        assert_eq!(d.gates.len(), 5);
        assert_eq!(d.gates[3].kind, GateKind::Barrier);
        assert_eq!(d.gates[4].clbits, [1]);
        assert_eq!(prov[&4], Origin::Logical(2));
    }
}
