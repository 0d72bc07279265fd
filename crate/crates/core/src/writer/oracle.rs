//! Compute-phase-uncompute phase oracles.
//!
//! Every binary node gets a fresh ancilla: AND is a Toffoli onto the ancilla,
//! OR goes through De Morgan, XOR is two CNOTs. Negation is tracked as a
//! polarity flag and only materialized as X gates around the Toffoli that
//! consumes it. The final value is phase-kicked with Z and the compute
//! section is replayed in reverse, returning every ancilla to `|0>`.

use std::collections::{BTreeMap, BTreeSet};

use super::expr::BooleanExpr;
use crate::circuit::{GateKind, GateOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("unmapped variable '{0}'")]
    UnmappedVariable(String),
    #[error("variables '{0}' and '{1}' map to the same qubit {2}")]
    NotInjective(String, String, usize),
    #[error("ancilla base {base} overlaps data qubit {qubit}")]
    AncillaOverlap { base: usize, qubit: usize },
}

/// Gate fragment implementing `|x>|0..0> -> (-1)^f(x) |x>|0..0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOracle {
    pub gates: Vec<GateOp>,
    /// Ancillas occupy `ancilla_base .. ancilla_base + n_ancillas`.
    pub ancilla_base: usize,
    pub n_ancillas: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Const(bool),
    Bit { qubit: usize, negated: bool },
}

impl Value {
    fn negate(self) -> Self {
        match self {
            Value::Const(c) => Value::Const(!c),
            Value::Bit { qubit, negated } => Value::Bit {
                qubit,
                negated: !negated,
            },
        }
    }
}

struct Builder<'a> {
    map: &'a BTreeMap<String, usize>,
    compute: Vec<GateOp>,
    base: usize,
    used: usize,
}

impl Builder<'_> {
    fn alloc(&mut self) -> usize {
        self.used += 1;
        self.base + self.used - 1
    }

    fn eval(&mut self, e: &BooleanExpr) -> Result<Value, OracleError> {
        Ok(match e {
            BooleanExpr::Var(v) => Value::Bit {
                qubit: *self
                    .map
                    .get(v)
                    .ok_or_else(|| OracleError::UnmappedVariable(v.clone()))?,
                negated: false,
            },
            BooleanExpr::Const(c) => Value::Const(*c),
            BooleanExpr::Not(a) => self.eval(a)?.negate(),
            BooleanExpr::And(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.and(a, b)
            }
            BooleanExpr::Or(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.and(a.negate(), b.negate()).negate()
            }
            BooleanExpr::Xor(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.xor(a, b)
            }
        })
    }

    fn and(&mut self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Const(false), _) | (_, Value::Const(false)) => Value::Const(false),
            (Value::Const(true), x) | (x, Value::Const(true)) => x,
            (
                Value::Bit { qubit: qa, negated: na },
                Value::Bit { qubit: qb, negated: nb },
            ) => {
                if qa == qb {
                    return if na == nb { a } else { Value::Const(false) };
                }
                let target = self.alloc();
                let flips: Vec<usize> = [(qa, na), (qb, nb)]
                    .into_iter()
                    .filter(|&(_, n)| n)
                    .map(|(q, _)| q)
                    .collect();
                for &q in &flips {
                    self.compute.push(GateOp::one(GateKind::X, q));
                }
                self.compute.push(GateOp::new(GateKind::Ccx, vec![qa, qb, target]));
                for &q in &flips {
                    self.compute.push(GateOp::one(GateKind::X, q));
                }
                Value::Bit {
                    qubit: target,
                    negated: false,
                }
            }
        }
    }

    fn xor(&mut self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Const(c), x) | (x, Value::Const(c)) => {
                if c {
                    x.negate()
                } else {
                    x
                }
            }
            (
                Value::Bit { qubit: qa, negated: na },
                Value::Bit { qubit: qb, negated: nb },
            ) => {
                if qa == qb {
                    return Value::Const(na != nb);
                }
                let target = self.alloc();
                self.compute.push(GateOp::cx(qa, target));
                self.compute.push(GateOp::cx(qb, target));
                Value::Bit {
                    qubit: target,
                    negated: na != nb,
                }
            }
        }
    }
}

/// Compiles `expr` into a phase oracle over the mapped data qubits.
///
/// Ancillas are allocated from `ancilla_base` upward, which must lie above every
/// mapped data qubit.
pub fn compile_phase_oracle(
    expr: &BooleanExpr,
    var_to_qubit: &BTreeMap<String, usize>,
    ancilla_base: usize,
) -> Result<PhaseOracle, OracleError> {
    let mut owner: BTreeMap<usize, &String> = BTreeMap::new();
    for (v, &q) in var_to_qubit {
        if let Some(prev) = owner.insert(q, v) {
            return Err(OracleError::NotInjective(prev.clone(), v.clone(), q));
        }
        if q >= ancilla_base {
            return Err(OracleError::AncillaOverlap {
                base: ancilla_base,
                qubit: q,
            });
        }
    }
    // Only variables that occur in the expression must be mapped.
    let used: BTreeSet<String> = expr.variables().into_iter().collect();
    if let Some(v) = used.iter().find(|v| !var_to_qubit.contains_key(*v)) {
        return Err(OracleError::UnmappedVariable(v.clone()));
    }

    let mut b = Builder {
        map: var_to_qubit,
        compute: Vec::new(),
        base: ancilla_base,
        used: 0,
    };
    let result = b.eval(expr)?;

    let mut phase = Vec::new();
    match result {
        Value::Const(false) => {}
        Value::Const(true) => {
            // Z X Z X = -I: a global sign, kept so the truth-table signs are exact.
            let q = match owner.keys().next() {
                Some(&q) => q,
                None => b.alloc(),
            };
            for kind in [GateKind::Z, GateKind::X, GateKind::Z, GateKind::X] {
                phase.push(GateOp::one(kind, q));
            }
        }
        Value::Bit { qubit, negated } => {
            if negated {
                phase.push(GateOp::one(GateKind::X, qubit));
            }
            phase.push(GateOp::one(GateKind::Z, qubit));
            if negated {
                phase.push(GateOp::one(GateKind::X, qubit));
            }
        }
    }

    let mut gates = b.compute.clone();
    gates.extend(phase);
    gates.extend(b.compute.iter().rev().cloned());
    Ok(PhaseOracle {
        gates,
        ancilla_base,
        n_ancillas: b.used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{unitary_of, Circuit};
    use crate::writer::expr::parse_bool_expr;
    use num_complex::Complex64;

    fn mapping(vars: &[&str]) -> BTreeMap<String, usize> {
        vars.iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect()
    }

    /// Diagonal of the oracle restricted to ancillas in |0>, checked to be a
    /// signed permutation-free diagonal.
    fn restricted_diagonal(oracle: &PhaseOracle, n_data: usize) -> Vec<Complex64> {
        let n = oracle.ancilla_base + oracle.n_ancillas;
        let mut c = Circuit::new(n.max(1), 0);
        for g in &oracle.gates {
            c.append_op(g.clone()).unwrap();
        }
        let u = unitary_of(&c).unwrap();
        (0..1usize << n_data)
            .map(|x| {
                for row in 0..u.dim() {
                    if row != x {
                        assert!(u.get(row, x).norm() < 1e-9, "leak from {x} to {row}");
                    }
                }
                u.get(x, x)
            })
            .collect()
    }

    #[test]
    fn and_marks_eleven() {
        let e = parse_bool_expr("a & b").unwrap();
        let o = compile_phase_oracle(&e, &mapping(&["a", "b"]), 2).unwrap();
        let d = restricted_diagonal(&o, 2);
        let want = [1.0, 1.0, 1.0, -1.0];
        for (got, w) in d.iter().zip(want) {
            assert!((got - Complex64::new(w, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn single_variable_is_z() {
        let e = parse_bool_expr("a").unwrap();
        let o = compile_phase_oracle(&e, &mapping(&["a"]), 1).unwrap();
        assert_eq!(o.n_ancillas, 0);
        let d = restricted_diagonal(&o, 1);
        assert!((d[0] - 1.0).norm() < 1e-12 && (d[1] + 1.0).norm() < 1e-12);
    }

    #[test]
    fn constant_false_is_identity() {
        let o = compile_phase_oracle(&BooleanExpr::Const(false), &mapping(&["a"]), 1).unwrap();
        assert!(o.gates.is_empty());
    }

    #[test]
    fn constant_true_is_minus_identity() {
        let o = compile_phase_oracle(&BooleanExpr::Const(true), &mapping(&["a"]), 1).unwrap();
        let d = restricted_diagonal(&o, 1);
        assert!(d.iter().all(|x| (x + 1.0).norm() < 1e-12));
    }

    #[test]
    fn repeated_variable_simplifies() {
        let e = parse_bool_expr("a & !a | b ^ b").unwrap();
        let o = compile_phase_oracle(&e, &mapping(&["a", "b"]), 2).unwrap();
        assert!(o.gates.is_empty());
    }

    #[test]
    fn mapping_errors() {
        let e = parse_bool_expr("a & c").unwrap();
        assert_eq!(
            compile_phase_oracle(&e, &mapping(&["a", "b"]), 2),
            Err(OracleError::UnmappedVariable("c".into()))
        );
        let dup = BTreeMap::from([("a".to_string(), 0), ("c".to_string(), 0)]);
        assert!(matches!(
            compile_phase_oracle(&e, &dup, 2),
            Err(OracleError::NotInjective(..))
        ));
        assert!(matches!(
            compile_phase_oracle(&e, &BTreeMap::from([("a".to_string(), 0), ("c".to_string(), 3)]), 2),
            Err(OracleError::AncillaOverlap { .. })
        ));
    }
}
