use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Gate vocabulary of the logical IR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    Sx,
    Cx,
    Cz,
    Swap,
    Ccx,
    Mcx,
    Barrier,
    Measure,
}

/// Number of qubits a kind acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitArity {
    Exactly(usize),
    AtLeast(usize),
    /// Barrier: any number of distinct qubits, empty meaning the whole register.
    Any,
}

impl QubitArity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            QubitArity::Exactly(k) => n == k,
            QubitArity::AtLeast(k) => n >= k,
            QubitArity::Any => true,
        }
    }
}

impl fmt::Display for QubitArity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitArity::Exactly(k) => write!(f, "{k}"),
            QubitArity::AtLeast(k) => write!(f, "at least {k}"),
            QubitArity::Any => write!(f, "any number of"),
        }
    }
}

impl GateKind {
    pub const ALL: [GateKind; 19] = [
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
        GateKind::Barrier,
        GateKind::Measure,
    ];

    /// Lowercase name used by documents, machine files and OpenQASM.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Sx => "sx",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Ccx => "ccx",
            GateKind::Mcx => "mcx",
            GateKind::Barrier => "barrier",
            GateKind::Measure => "measure",
        }
    }

    pub fn param_arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            _ => 0,
        }
    }

    pub fn qubit_arity(self) -> QubitArity {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => QubitArity::Exactly(2),
            GateKind::Ccx => QubitArity::Exactly(3),
            GateKind::Mcx => QubitArity::AtLeast(2),
            GateKind::Barrier => QubitArity::Any,
            _ => QubitArity::Exactly(1),
        }
    }

    pub fn clbit_arity(self) -> usize {
        usize::from(self == GateKind::Measure)
    }

    /// Unitary gates, i.e. everything except barrier and measure.
    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Barrier | GateKind::Measure)
    }

    pub fn is_self_inverse(self) -> bool {
        matches!(
            self,
            GateKind::H
                | GateKind::X
                | GateKind::Y
                | GateKind::Z
                | GateKind::Cx
                | GateKind::Cz
                | GateKind::Swap
                | GateKind::Ccx
                | GateKind::Mcx
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown gate kind '{0}'")]
pub struct UnknownGateKind(pub String);

impl FromStr for GateKind {
    type Err = UnknownGateKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| UnknownGateKind(s.to_string()))
    }
}

/// A gate placed in a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateInstance {
    pub id: usize,
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clbits: Vec<usize>,
}

/// A gate without an id, as produced by synthesis and decomposition passes.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    pub clbits: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self {
            kind,
            qubits,
            params: Vec::new(),
            clbits: Vec::new(),
        }
    }

    pub fn with_params(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Self {
        Self {
            kind,
            qubits,
            params,
            clbits: Vec::new(),
        }
    }

    pub fn one(kind: GateKind, q: usize) -> Self {
        Self::new(kind, vec![q])
    }

    pub fn rz(theta: f64, q: usize) -> Self {
        Self::with_params(GateKind::Rz, vec![q], vec![theta])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cx, vec![control, target])
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Self {
            kind: GateKind::Measure,
            qubits: vec![qubit],
            params: Vec::new(),
            clbits: vec![clbit],
        }
    }

    pub fn with_id(self, id: usize) -> GateInstance {
        GateInstance {
            id,
            kind: self.kind,
            qubits: self.qubits,
            params: self.params,
            clbits: self.clbits,
        }
    }
}

impl From<&GateInstance> for GateOp {
    fn from(g: &GateInstance) -> Self {
        Self {
            kind: g.kind,
            qubits: g.qubits.clone(),
            params: g.params.clone(),
            clbits: g.clbits.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in GateKind::ALL {
            assert_eq!(k.name().parse::<GateKind>().unwrap(), k);
        }
        assert!("u3".parse::<GateKind>().is_err());
        assert_eq!("CX".parse::<GateKind>().unwrap(), GateKind::Cx);
    }

    #[test]
    fn arities() {
        assert_eq!(GateKind::Rz.param_arity(), 1);
        assert_eq!(GateKind::H.param_arity(), 0);
        assert!(GateKind::Mcx.qubit_arity().accepts(5));
        assert!(!GateKind::Mcx.qubit_arity().accepts(1));
        assert!(!GateKind::Ccx.qubit_arity().accepts(2));
        assert_eq!(GateKind::Measure.clbit_arity(), 1);
    }
}
