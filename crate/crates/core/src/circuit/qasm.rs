//! OpenQASM 2.0 emission and a reader for the same dialect.

use std::f64::consts::PI;
use std::fmt::Write as _;

use super::{build_circuit, Circuit, CircuitDocument, GateDocument, GateKind};
use crate::diagnostics::{Diagnostic, Diagnostics};

const MAX_PI_DENOMINATOR: i64 = 64;

/// Formats an angle as `p*pi/q` when that text evaluates back to exactly the
/// same `f64`, otherwise with 17 significant digits. Either way the reader
/// recovers the identical value.
pub fn format_angle(theta: f64) -> String {
    if theta == 0.0 {
        return "0".to_string();
    }
    for q in 1..=MAX_PI_DENOMINATOR {
        let p = (theta * q as f64 / PI).round();
        if p == 0.0 || p.abs() > 1e6 {
            continue;
        }
        if p * PI / q as f64 == theta {
            let p = p as i64;
            let num = match p {
                1 => "pi".to_string(),
                -1 => "-pi".to_string(),
                _ => format!("{p}*pi"),
            };
            return if q == 1 { num } else { format!("{num}/{q}") };
        }
    }
    format!("{theta:.16e}")
}

/// Renders a circuit as OpenQASM 2.0. Output is a pure function of the gate list.
pub fn to_openqasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.n_qubits);
    if circuit.n_clbits > 0 {
        let _ = writeln!(out, "creg c[{}];", circuit.n_clbits);
    }
    for g in &circuit.gates {
        let qubits = g
            .qubits
            .iter()
            .map(|q| format!("q[{q}]"))
            .collect::<Vec<_>>()
            .join(",");
        match g.kind {
            GateKind::Measure => {
                let _ = writeln!(out, "measure q[{}] -> c[{}];", g.qubits[0], g.clbits[0]);
            }
            GateKind::Barrier if g.qubits.is_empty() => out.push_str("barrier q;\n"),
            _ => {
                out.push_str(g.kind.name());
                if !g.params.is_empty() {
                    let params: Vec<String> = g.params.iter().map(|p| format_angle(*p)).collect();
                    let _ = write!(out, "({})", params.join(","));
                }
                let _ = writeln!(out, " {qubits};");
            }
        }
    }
    out
}

fn qasm_error(line: usize, msg: impl std::fmt::Display) -> Diagnostics {
    Diagnostic::error("qasm", format!("line {line}: {msg}")).into()
}

/// Parses the dialect emitted by [`to_openqasm`] back into a circuit.
pub fn from_openqasm(text: &str) -> Result<Circuit, Diagnostics> {
    let mut n_qubits = None;
    let mut n_clbits = None;
    let mut qreg = String::from("q");
    let mut creg = String::from("c");
    let mut gates = Vec::new();

    let stripped: String = text
        .lines()
        .map(|l| l.split("//").next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");

    for (index, raw) in stripped.split(';').enumerate() {
        let stmt = raw.trim();
        if stmt.is_empty() {
            continue;
        }
        let line = index + 1;
        let (head, rest) = match stmt.find(|c: char| c.is_whitespace() || c == '(') {
            Some(pos) => (&stmt[..pos], stmt[pos..].trim()),
            None => (stmt, ""),
        };
        match head {
            "OPENQASM" => {
                if rest != "2.0" {
                    return Err(qasm_error(line, format!("unsupported version '{rest}'")));
                }
            }
            "include" => {}
            "qreg" | "creg" => {
                let (name, size) = parse_indexed(rest).ok_or_else(|| qasm_error(line, "bad register declaration"))?;
                if head == "qreg" {
                    qreg = name;
                    n_qubits = Some(size);
                } else {
                    creg = name;
                    n_clbits = Some(size);
                }
            }
            "measure" => {
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| qasm_error(line, "measure needs '->'"))?;
                let q = parse_bit(lhs.trim(), &qreg).ok_or_else(|| qasm_error(line, "bad qubit operand"))?;
                let c = parse_bit(rhs.trim(), &creg).ok_or_else(|| qasm_error(line, "bad clbit operand"))?;
                gates.push(GateDocument {
                    id: None,
                    kind: "measure".into(),
                    qubits: vec![q],
                    params: vec![],
                    clbits: vec![c],
                });
            }
            _ => {
                let (params, operands) = if let Some(body) = rest.strip_prefix('(') {
                    let close = body
                        .find(')')
                        .ok_or_else(|| qasm_error(line, "unclosed parameter list"))?;
                    let params = body[..close]
                        .split(',')
                        .map(|p| eval_angle(p.trim()).map_err(|e| qasm_error(line, e)))
                        .collect::<Result<Vec<_>, _>>()?;
                    (params, body[close + 1..].trim())
                } else {
                    (Vec::new(), rest)
                };
                let qubits = if head == "barrier" && operands == qreg {
                    Vec::new()
                } else {
                    operands
                        .split(',')
                        .map(|o| parse_bit(o.trim(), &qreg).ok_or_else(|| qasm_error(line, format!("bad operand '{o}'"))))
                        .collect::<Result<Vec<_>, _>>()?
                };
                gates.push(GateDocument {
                    id: None,
                    kind: head.to_string(),
                    qubits,
                    params,
                    clbits: vec![],
                });
            }
        }
    }

    let n_qubits = n_qubits.ok_or_else(|| qasm_error(0, "missing qreg declaration"))?;
    build_circuit(&CircuitDocument {
        name: None,
        n_qubits,
        n_clbits: Some(n_clbits.unwrap_or(0)),
        gates,
        observables: vec![],
        metadata: Default::default(),
    })
}

fn parse_indexed(s: &str) -> Option<(String, usize)> {
    let open = s.find('[')?;
    let close = s.find(']')?;
    let name = s[..open].trim().to_string();
    let idx = s[open + 1..close].trim().parse().ok()?;
    Some((name, idx))
}

fn parse_bit(s: &str, reg: &str) -> Option<usize> {
    let (name, idx) = parse_indexed(s)?;
    (name == reg).then_some(idx)
}

/// Evaluates `+ - * /` expressions over numbers and `pi`.
fn eval_angle(text: &str) -> Result<f64, String> {
    struct P<'a> {
        s: &'a [u8],
        i: usize,
    }
    impl P<'_> {
        fn ws(&mut self) {
            while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
                self.i += 1;
            }
        }
        fn peek(&mut self) -> Option<u8> {
            self.ws();
            self.s.get(self.i).copied()
        }
        fn sum(&mut self) -> Result<f64, String> {
            let mut v = self.product()?;
            while let Some(c @ (b'+' | b'-')) = self.peek() {
                self.i += 1;
                let r = self.product()?;
                v = if c == b'+' { v + r } else { v - r };
            }
            Ok(v)
        }
        fn product(&mut self) -> Result<f64, String> {
            let mut v = self.unary()?;
            while let Some(c @ (b'*' | b'/')) = self.peek() {
                self.i += 1;
                let r = self.unary()?;
                v = if c == b'*' { v * r } else { v / r };
            }
            Ok(v)
        }
        fn unary(&mut self) -> Result<f64, String> {
            match self.peek() {
                Some(b'-') => {
                    self.i += 1;
                    Ok(-self.unary()?)
                }
                Some(b'+') => {
                    self.i += 1;
                    self.unary()
                }
                _ => self.atom(),
            }
        }
        fn atom(&mut self) -> Result<f64, String> {
            match self.peek() {
                Some(b'(') => {
                    self.i += 1;
                    let v = self.sum()?;
                    if self.peek() != Some(b')') {
                        return Err("expected ')'".into());
                    }
                    self.i += 1;
                    Ok(v)
                }
                Some(b'p') if self.s[self.i..].starts_with(b"pi") => {
                    self.i += 2;
                    Ok(PI)
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    let start = self.i;
                    while self.i < self.s.len() {
                        let c = self.s[self.i];
                        let exp_sign = (c == b'-' || c == b'+')
                            && matches!(self.s[self.i - 1], b'e' | b'E');
                        if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                            self.i += 1;
                        } else {
                            break;
                        }
                    }
                    let lit = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                    lit.parse().map_err(|_| format!("bad number '{lit}'"))
                }
                _ => Err(format!("unexpected input at offset {}", self.i)),
            }
        }
    }
    let mut p = P { s: text.as_bytes(), i: 0 };
    let v = p.sum()?;
    if p.peek().is_some() {
        return Err(format!("trailing input in angle '{text}'"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2, 0);
        c.append_gate(GateKind::H, &[0], &[]).unwrap();
        c.append_gate(GateKind::Cx, &[0, 1], &[]).unwrap();
        c
    }

    #[test]
    fn bell_lines_in_order() {
        let q = to_openqasm(&bell());
        assert_eq!(
            q,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n"
        );
    }

    #[test]
    fn empty_circuit_declarations_only() {
        let q = to_openqasm(&Circuit::new(3, 0));
        assert_eq!(q, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n");
    }

    #[test]
    fn angle_formatting() {
        assert_eq!(format_angle(PI / 2.0), "pi/2");
        assert_eq!(format_angle(-PI / 2.0), "-pi/2");
        assert_eq!(format_angle(PI), "pi");
        assert_eq!(format_angle(3.0 * PI / 4.0), "3*pi/4");
        assert_eq!(format_angle(2.0 * PI), "2*pi");
        assert_eq!(format_angle(0.0), "0");
        assert_eq!(format_angle(0.1), "1.0000000000000001e-1");
        assert_eq!(format_angle(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn rz_half_pi_line() {
        let mut c = Circuit::new(1, 0);
        c.append_gate(GateKind::Rz, &[0], &[PI / 2.0]).unwrap();
        assert!(to_openqasm(&c).contains("rz(pi/2) q[0];\n"));
    }

    #[test]
    fn measurement_and_barrier_round_trip() {
        let mut c = Circuit::new(2, 2);
        c.append_gate(GateKind::H, &[0], &[]).unwrap();
        c.append_gate(GateKind::Barrier, &[], &[]).unwrap();
        c.append_gate(GateKind::Barrier, &[0, 1], &[]).unwrap();
        c.append_gate(GateKind::Ry, &[1], &[-0.3]).unwrap();
        c.measure(0, 1).unwrap();
        let text = to_openqasm(&c);
        assert!(text.contains("barrier q;\n"));
        assert!(text.contains("measure q[0] -> c[1];\n"));
        let back = from_openqasm(&text).unwrap();
        assert_eq!(back.gates, c.gates);
    }

    #[test]
    fn angle_expressions() {
        assert!((eval_angle("3*pi/4").unwrap() - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((eval_angle("-pi/2").unwrap() + PI / 2.0).abs() < 1e-15);
        assert_eq!(eval_angle("1.5e-3").unwrap(), 1.5e-3);
        assert!(eval_angle("pi pi").is_err());
    }

    #[test]
    fn reader_reports_bad_input() {
        assert!(from_openqasm("OPENQASM 2.0; h q[0];").is_err());
        assert!(from_openqasm("OPENQASM 2.0; qreg q[1]; foo q[0];").unwrap_err().mentions("schema"));
    }
}
