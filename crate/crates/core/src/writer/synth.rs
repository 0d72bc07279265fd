use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::expr::{parse_bool_expr, BooleanExpr};
use super::oracle::compile_phase_oracle;
use crate::circuit::{parse_pauli_observable, validate_circuit, Circuit, GateKind, GateOp};
use crate::diagnostics::{Diagnostic, Diagnostics};

/// High-level description of a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptualSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub register_size: usize,
    #[serde(default)]
    pub ops: Vec<ConceptualOp>,
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default)]
    pub measure_all: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConceptualOp {
    Superposition {
        qubits: Vec<usize>,
    },
    BellPair {
        q0: usize,
        q1: usize,
    },
    Ghz {
        qubits: Vec<usize>,
    },
    Qft {
        qubits: Vec<usize>,
    },
    GroverSearch {
        /// Boolean expression text, e.g. `"a & !b"`.
        expr: String,
        /// Variable-to-qubit order; variable `i` lives on qubit `i`. Defaults to
        /// order of first appearance in `expr`.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        var_order: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        iterations: Option<usize>,
    },
    RawGate {
        kind: String,
        qubits: Vec<usize>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        params: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        clbits: Vec<usize>,
    },
}

/// `floor(pi/4 * sqrt(2^v / M))`, or 0 when nothing is marked.
pub fn default_grover_iterations(n_vars: usize, solutions: usize) -> usize {
    if solutions == 0 {
        return 0;
    }
    let ratio = (1u64 << n_vars) as f64 / solutions as f64;
    (PI / 4.0 * ratio.sqrt()).floor() as usize
}

/// Multi-controlled X over clean ancillas starting at `ancilla_base`.
/// Returns the number of ancillas used (k - 2 for k >= 3 controls).
pub(crate) fn emit_mcx(out: &mut Vec<GateOp>, controls: &[usize], target: usize, ancilla_base: usize) -> usize {
    match controls.len() {
        0 => {
            out.push(GateOp::one(GateKind::X, target));
            0
        }
        1 => {
            out.push(GateOp::cx(controls[0], target));
            0
        }
        2 => {
            out.push(GateOp::new(GateKind::Ccx, vec![controls[0], controls[1], target]));
            0
        }
        k => {
            let anc: Vec<usize> = (0..k - 2).map(|i| ancilla_base + i).collect();
            let mut chain = vec![GateOp::new(GateKind::Ccx, vec![controls[0], controls[1], anc[0]])];
            for i in 1..k - 2 {
                chain.push(GateOp::new(GateKind::Ccx, vec![controls[i + 1], anc[i - 1], anc[i]]));
            }
            out.extend(chain.iter().cloned());
            out.push(GateOp::new(GateKind::Ccx, vec![controls[k - 1], anc[k - 3], target]));
            out.extend(chain.into_iter().rev());
            k - 2
        }
    }
}

/// Z on `|1..1>` of `qubits`. Returns ancillas used.
fn emit_mcz(out: &mut Vec<GateOp>, qubits: &[usize], ancilla_base: usize) -> usize {
    match qubits {
        [] => 0,
        [q] => {
            out.push(GateOp::one(GateKind::Z, *q));
            0
        }
        [a, b] => {
            out.push(GateOp::new(GateKind::Cz, vec![*a, *b]));
            0
        }
        [controls @ .., target] => {
            out.push(GateOp::one(GateKind::H, *target));
            let used = emit_mcx(out, controls, *target, ancilla_base);
            out.push(GateOp::one(GateKind::H, *target));
            used
        }
    }
}

/// Controlled phase built from RZ and CX (exact up to global phase).
fn emit_cphase(out: &mut Vec<GateOp>, lambda: f64, a: usize, b: usize) {
    out.push(GateOp::rz(lambda / 2.0, a));
    out.push(GateOp::cx(a, b));
    out.push(GateOp::rz(-lambda / 2.0, b));
    out.push(GateOp::cx(a, b));
    out.push(GateOp::rz(lambda / 2.0, b));
}

/// `|x> -> sum_y e^{2 pi i x y / 2^m} |y>` with `qubits[0]` least significant.
fn emit_qft(out: &mut Vec<GateOp>, qubits: &[usize]) {
    let m = qubits.len();
    for j in (0..m).rev() {
        out.push(GateOp::one(GateKind::H, qubits[j]));
        for k in (0..j).rev() {
            let lambda = PI * 2f64.powi(k as i32 - j as i32);
            emit_cphase(out, lambda, qubits[j], qubits[k]);
        }
    }
    for i in 0..m / 2 {
        out.push(GateOp::new(GateKind::Swap, vec![qubits[i], qubits[m - 1 - i]]));
    }
}

fn emit_diffuser(out: &mut Vec<GateOp>, qubits: &[usize], ancilla_base: usize) -> usize {
    for &q in qubits {
        out.push(GateOp::one(GateKind::H, q));
    }
    for &q in qubits {
        out.push(GateOp::one(GateKind::X, q));
    }
    let used = emit_mcz(out, qubits, ancilla_base);
    for &q in qubits {
        out.push(GateOp::one(GateKind::X, q));
    }
    for &q in qubits {
        out.push(GateOp::one(GateKind::H, q));
    }
    used
}

struct Ctx {
    register: usize,
    diags: Diagnostics,
}

impl Ctx {
    fn error(&mut self, op: usize, code: &str, msg: String) {
        self.diags.push(Diagnostic::error(code, msg).with_op(op));
    }

    fn warn(&mut self, op: usize, code: &str, msg: String) {
        self.diags.push(Diagnostic::warning(code, msg).with_op(op));
    }

    /// Range and distinctness checks; true when the op may be expanded.
    fn check_qubits(&mut self, op: usize, qubits: &[usize], min: usize) -> bool {
        let mut ok = true;
        if qubits.len() < min {
            self.error(op, "op_arity", format!("operation needs at least {min} qubit(s), got {}", qubits.len()));
            ok = false;
        }
        for &q in qubits {
            if q >= self.register {
                self.error(
                    op,
                    "qubit_range",
                    format!("qubit {q} exceeds register of size {} (the number of qubits exceeded)", self.register),
                );
                ok = false;
            }
        }
        let distinct: BTreeSet<_> = qubits.iter().collect();
        if distinct.len() != qubits.len() {
            self.error(op, "duplicate_qubit", "duplicate qubit in operation".to_string());
            ok = false;
        }
        ok
    }
}

/// Expands a conceptual spec into a circuit. Problems never abort: offending
/// operations are skipped and reported, and the final circuit is validated.
pub fn synthesize(spec: &ConceptualSpec) -> (Circuit, Diagnostics) {
    let register = spec.register_size;
    let mut cx = Ctx {
        register,
        diags: Diagnostics::new(),
    };
    if register == 0 {
        cx.diags.push(Diagnostic::error("register", "register must contain at least one qubit"));
    }

    let mut ops: Vec<GateOp> = Vec::new();
    let mut ancillas = 0usize;
    let mut raw_clbits = 0usize;

    for (i, op) in spec.ops.iter().enumerate() {
        match op {
            ConceptualOp::Superposition { qubits } => {
                if cx.check_qubits(i, qubits, 1) {
                    ops.extend(qubits.iter().map(|&q| GateOp::one(GateKind::H, q)));
                }
            }
            ConceptualOp::BellPair { q0, q1 } => {
                if cx.check_qubits(i, &[*q0, *q1], 2) {
                    ops.push(GateOp::one(GateKind::H, *q0));
                    ops.push(GateOp::cx(*q0, *q1));
                }
            }
            ConceptualOp::Ghz { qubits } => {
                if cx.check_qubits(i, qubits, 1) {
                    ops.push(GateOp::one(GateKind::H, qubits[0]));
                    for w in qubits.windows(2) {
                        ops.push(GateOp::cx(w[0], w[1]));
                    }
                }
            }
            ConceptualOp::Qft { qubits } => {
                if cx.check_qubits(i, qubits, 1) {
                    emit_qft(&mut ops, qubits);
                }
            }
            ConceptualOp::GroverSearch {
                expr,
                var_order,
                iterations,
            } => {
                if let Some(used) = expand_grover(&mut cx, i, &mut ops, expr, var_order, *iterations) {
                    ancillas = ancillas.max(used);
                }
            }
            ConceptualOp::RawGate {
                kind,
                qubits,
                params,
                clbits,
            } => match kind.parse::<GateKind>() {
                Ok(kind) => {
                    let min = usize::from(kind != GateKind::Barrier);
                    if cx.check_qubits(i, qubits, min) {
                        raw_clbits = raw_clbits.max(clbits.iter().map(|c| c + 1).max().unwrap_or(0));
                        ops.push(GateOp {
                            kind,
                            qubits: qubits.clone(),
                            params: params.clone(),
                            clbits: clbits.clone(),
                        });
                    }
                }
                Err(e) => cx.error(i, "schema", format!("schema violation: {e}")),
            },
        }
    }

    let n_clbits = raw_clbits.max(if spec.measure_all { register } else { 0 });
    let mut circuit = Circuit::new(register + ancillas, n_clbits);
    if let Some(name) = &spec.name {
        circuit.name = name.clone();
    }
    circuit.metadata.insert("data_qubits".into(), register.to_string());
    circuit.metadata.insert("ancillas".into(), ancillas.to_string());
    if ancillas > 0 {
        circuit.metadata.insert("ancilla_base".into(), register.to_string());
    }

    for op in ops {
        if let Err(d) = circuit.append_op(op) {
            cx.diags.extend(d);
        }
    }
    if spec.measure_all {
        for q in 0..register {
            if let Err(d) = circuit.measure(q, q) {
                cx.diags.extend(d);
            }
        }
    }
    for text in &spec.observables {
        match parse_pauli_observable(text, register) {
            Ok(obs) => circuit.observables.push(obs.padded_to(register + ancillas)),
            Err(e) => cx.diags.push(e.to_diagnostic()),
        }
    }

    for d in validate_circuit(&circuit).0 {
        if !cx.diags.0.contains(&d) {
            cx.diags.push(d);
        }
    }
    (circuit, cx.diags)
}

fn expand_grover(
    cx: &mut Ctx,
    i: usize,
    ops: &mut Vec<GateOp>,
    text: &str,
    var_order: &[String],
    iterations: Option<usize>,
) -> Option<usize> {
    let expr: BooleanExpr = match parse_bool_expr(text) {
        Ok(e) => e,
        Err(e) => {
            cx.error(i, "expr", e.to_string());
            return None;
        }
    };
    let free = expr.variables();
    let order: Vec<String> = if var_order.is_empty() {
        free.clone()
    } else {
        let given: BTreeSet<&String> = var_order.iter().collect();
        let missing: Vec<&str> = free.iter().filter(|v| !given.contains(v)).map(String::as_str).collect();
        if given.len() != var_order.len() || !missing.is_empty() {
            cx.error(
                i,
                "var_order",
                format!(
                    "var_order [{}] must list each expression variable [{}] exactly once",
                    var_order.join(", "),
                    free.join(", ")
                ),
            );
            return None;
        }
        var_order.to_vec()
    };
    if order.is_empty() {
        cx.warn(i, "grover_constant", "expression has no variables; nothing to search".into());
        return None;
    }
    let mut fits = true;
    for (q, v) in order.iter().enumerate() {
        if q >= cx.register {
            cx.error(
                i,
                "variable_range",
                format!("variable {v} exceeds register: needs qubit {q}, register size is {}", cx.register),
            );
            fits = false;
        }
    }
    if !fits {
        return None;
    }

    let data: Vec<usize> = (0..order.len()).collect();
    let solutions = expr.count_solutions(&order);
    if solutions == 0 {
        cx.warn(i, "grover_unsatisfiable", format!("expression '{expr}' has no satisfying assignment; using 0 iterations"));
    }
    let rounds = iterations.unwrap_or_else(|| default_grover_iterations(order.len(), solutions));

    let mapping: BTreeMap<String, usize> = order.iter().cloned().zip(data.iter().copied()).collect();
    let oracle = compile_phase_oracle(&expr, &mapping, cx.register).expect("mapping is injective and complete");

    let mut used = 0;
    ops.extend(data.iter().map(|&q| GateOp::one(GateKind::H, q)));
    for _ in 0..rounds {
        ops.extend(oracle.gates.iter().cloned());
        used = used.max(emit_diffuser(ops, &data, cx.register));
    }
    if rounds > 0 {
        used = used.max(oracle.n_ancillas);
    }
    Some(used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::unitary_of;
    use crate::simulator::statevector;
    use num_complex::Complex64;

    fn spec(register_size: usize, ops: Vec<ConceptualOp>, measure_all: bool) -> ConceptualSpec {
        ConceptualSpec {
            name: None,
            register_size,
            ops,
            observables: vec![],
            measure_all,
        }
    }

    fn grover(expr: &str, iterations: Option<usize>) -> ConceptualOp {
        ConceptualOp::GroverSearch {
            expr: expr.into(),
            var_order: vec![],
            iterations,
        }
    }

    #[test]
    fn bell_pair_expansion() {
        let (c, d) = synthesize(&spec(2, vec![ConceptualOp::BellPair { q0: 0, q1: 1 }], true));
        assert!(d.is_empty(), "{d}");
        let kinds: Vec<_> = c.gates.iter().map(|g| (g.kind, g.qubits.clone())).collect();
        assert_eq!(
            kinds,
            vec![
                (GateKind::H, vec![0]),
                (GateKind::Cx, vec![0, 1]),
                (GateKind::Measure, vec![0]),
                (GateKind::Measure, vec![1]),
            ]
        );
        assert_eq!(c.n_clbits, 2);
    }

    #[test]
    fn grover_two_qubits_finds_eleven() {
        let (c, d) = synthesize(&spec(2, vec![grover("a & b", Some(1))], true));
        assert!(!d.has_errors(), "{d}");
        let s = statevector(&c).unwrap();
        let data_bits = 2;
        let p11: f64 = s
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & ((1 << data_bits) - 1) == 0b11)
            .map(|(_, p)| p)
            .sum();
        assert!((p11 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grover_variable_beyond_register() {
        let (_, d) = synthesize(&spec(2, vec![grover("a & b & c", None)], false));
        assert!(d.has_errors());
        assert!(d.mentions("variable c exceeds register"));
        assert_eq!(d.0[0].op_index, Some(0));
    }

    #[test]
    fn default_iterations() {
        assert_eq!(default_grover_iterations(2, 1), 1);
        assert_eq!(default_grover_iterations(3, 1), 2);
        assert_eq!(default_grover_iterations(4, 1), 3);
        assert_eq!(default_grover_iterations(3, 0), 0);
        assert_eq!(default_grover_iterations(2, 4), 0);
    }

    #[test]
    fn unsatisfiable_oracle_warns() {
        let (c, d) = synthesize(&spec(2, vec![grover("a & !a ^ b & !b", None)], false));
        assert!(!d.has_errors());
        assert!(d.mentions("no satisfying assignment"));
        assert!(c.gates.iter().all(|g| g.kind == GateKind::H));
    }

    #[test]
    fn var_order_must_match() {
        let op = ConceptualOp::GroverSearch {
            expr: "a & b".into(),
            var_order: vec!["a".into()],
            iterations: None,
        };
        let (_, d) = synthesize(&spec(2, vec![op], false));
        assert!(d.mentions("var_order"));

        // Extra variables are don't-cares and widen the search space.
        let op = ConceptualOp::GroverSearch {
            expr: "a".into(),
            var_order: vec!["a".into(), "b".into()],
            iterations: Some(1),
        };
        let (c, d) = synthesize(&spec(2, vec![op], false));
        assert!(!d.has_errors());
        let s = statevector(&c).unwrap();
        // Half the space marked: sin^2(3 * pi/4) = 0.5.
        assert!((s.probability_of("01") + s.probability_of("11") - 0.5).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_op_is_skipped_and_reported() {
        let (c, d) = synthesize(&spec(
            2,
            vec![
                ConceptualOp::Superposition { qubits: vec![0, 3] },
                ConceptualOp::Ghz { qubits: vec![0, 1] },
            ],
            false,
        ));
        assert!(d.has_errors());
        assert_eq!(d.0[0].op_index, Some(0));
        assert_eq!(c.gates.len(), 2);
    }

    #[test]
    fn observables_checked_and_padded() {
        let mut s = spec(3, vec![grover("a & b & c", Some(1))], false);
        s.observables = vec!["ZZZ".into(), "ZZ".into()];
        let (c, d) = synthesize(&s);
        assert!(d.mentions("observable length mismatch"));
        assert_eq!(c.n_qubits, 5);
        assert_eq!(c.observables.len(), 1);
        assert_eq!(c.observables[0].label, "IIZZZ");
        assert!(validate_circuit(&c).is_empty());
    }

    #[test]
    fn mcx_v_chain_matches_dense_mcx() {
        for k in 3..=5 {
            let n = k + 1 + (k - 2);
            let controls: Vec<usize> = (0..k).collect();
            let mut ops = Vec::new();
            assert_eq!(emit_mcx(&mut ops, &controls, k, k + 1), k - 2);
            let mut chain = Circuit::new(n, 0);
            for op in ops {
                chain.append_op(op).unwrap();
            }
            let mut direct = Circuit::new(n, 0);
            let mut qs = controls.clone();
            qs.push(k);
            direct.append_gate(GateKind::Mcx, &qs, &[]).unwrap();
            let (u, v) = (unitary_of(&chain).unwrap(), unitary_of(&direct).unwrap());
            // Compare on inputs with ancillas clean.
            for x in 0..1usize << (k + 1) {
                for row in 0..u.dim() {
                    assert!((u.get(row, x) - v.get(row, x)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qft_matches_dft() {
        for m in 1..=3 {
            let qubits: Vec<usize> = (0..m).collect();
            let (c, d) = synthesize(&spec(m, vec![ConceptualOp::Qft { qubits }], false));
            assert!(d.is_empty());
            let u = unitary_of(&c).unwrap();
            let dim = 1usize << m;
            let mut dft = Vec::with_capacity(dim * dim);
            for y in 0..dim {
                for x in 0..dim {
                    let angle = 2.0 * PI * (x * y) as f64 / dim as f64;
                    dft.push(Complex64::from_polar(1.0 / (dim as f64).sqrt(), angle));
                }
            }
            let dft = crate::circuit::UnitaryMatrix::from_rows(m, dft);
            assert!(u.equivalent_up_to_phase(&dft, 1e-10), "m = {m}");
        }
    }

    #[test]
    fn ghz_three() {
        let (c, _) = synthesize(&spec(3, vec![ConceptualOp::Ghz { qubits: vec![0, 1, 2] }], false));
        let s = statevector(&c).unwrap();
        assert!((s.probability_of("000") - 0.5).abs() < 1e-12);
        assert!((s.probability_of("111") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn raw_gate_and_unknown_kind() {
        let (c, d) = synthesize(&spec(
            1,
            vec![
                ConceptualOp::RawGate { kind: "rz".into(), qubits: vec![0], params: vec![0.5], clbits: vec![] },
                ConceptualOp::RawGate { kind: "u9".into(), qubits: vec![0], params: vec![], clbits: vec![] },
                ConceptualOp::RawGate { kind: "measure".into(), qubits: vec![0], params: vec![], clbits: vec![2] },
            ],
            false,
        ));
        assert_eq!(c.gates.len(), 2);
        assert_eq!(c.n_clbits, 3);
        assert!(d.mentions("unknown gate kind"));
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn spec_json_shape() {
        let s: ConceptualSpec = serde_json::from_str(
            r#"{"register_size":2,"ops":[{"op":"bell_pair","q0":0,"q1":1},
                {"op":"grover_search","expr":"a & b","iterations":1},
                {"op":"superposition","qubits":[0]},{"op":"qft","qubits":[0,1]},{"op":"ghz","qubits":[0,1]},
                {"op":"raw_gate","kind":"h","qubits":[1]}],"measure_all":true}"#,
        )
        .unwrap();
        assert_eq!(s.ops.len(), 6);
        assert!(matches!(s.ops[1], ConceptualOp::GroverSearch { iterations: Some(1), .. }));
    }

    #[test]
    fn deterministic() {
        let s = spec(3, vec![grover("a & b | !c", None), ConceptualOp::Qft { qubits: vec![0, 2] }], true);
        assert_eq!(synthesize(&s), synthesize(&s));
    }
}
