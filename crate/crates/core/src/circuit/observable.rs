use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostic;

/// A weighted Pauli string. `label[0]` acts on the highest qubit index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliObservable {
    pub label: String,
    #[serde(default = "one")]
    pub coefficient: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObservableError {
    #[error("observable length mismatch: '{label}' has {len} characters, register has {n_qubits} qubits")]
    LengthMismatch {
        label: String,
        len: usize,
        n_qubits: usize,
    },
    #[error("invalid Pauli character '{0}'")]
    InvalidCharacter(char),
    #[error("invalid observable coefficient '{0}'")]
    InvalidCoefficient(String),
    #[error("empty observable")]
    Empty,
}

impl ObservableError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        let code = match self {
            ObservableError::LengthMismatch { .. } => "observable_length",
            ObservableError::InvalidCharacter(_) => "observable_char",
            ObservableError::InvalidCoefficient(_) => "observable_coefficient",
            ObservableError::Empty => "observable_empty",
        };
        Diagnostic::error(code, self.to_string())
    }
}

impl PauliObservable {
    /// Pauli character acting on `qubit`.
    pub fn pauli_on(&self, qubit: usize) -> char {
        let n = self.label.len();
        self.label.as_bytes()[n - 1 - qubit] as char
    }

    pub fn n_qubits(&self) -> usize {
        self.label.len()
    }

    /// Identity padding on the high side, for registers grown by ancillas.
    pub fn padded_to(&self, n_qubits: usize) -> PauliObservable {
        let pad = n_qubits.saturating_sub(self.label.len());
        PauliObservable {
            label: format!("{}{}", "I".repeat(pad), self.label),
            coefficient: self.coefficient,
        }
    }

    pub fn check(&self, n_qubits: usize) -> Result<(), ObservableError> {
        if let Some(c) = self.label.chars().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
            return Err(ObservableError::InvalidCharacter(c));
        }
        if self.label.is_empty() {
            return Err(ObservableError::Empty);
        }
        if self.label.len() != n_qubits {
            return Err(ObservableError::LengthMismatch {
                label: self.label.clone(),
                len: self.label.len(),
                n_qubits,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient == 1.0 {
            f.write_str(&self.label)
        } else {
            write!(f, "{}*{}", self.coefficient, self.label)
        }
    }
}

/// Parses `"ZZ"` or `"0.5*XY"` and checks it against a register of `n_qubits`.
pub fn parse_pauli_observable(text: &str, n_qubits: usize) -> Result<PauliObservable, ObservableError> {
    let obs = parse_unchecked(text)?;
    obs.check(n_qubits)?;
    Ok(obs)
}

pub(crate) fn parse_unchecked(text: &str) -> Result<PauliObservable, ObservableError> {
    let text = text.trim();
    let (coefficient, label) = match text.split_once('*') {
        Some((c, l)) => {
            let c = c.trim();
            let coefficient: f64 = c
                .parse()
                .map_err(|_| ObservableError::InvalidCoefficient(c.to_string()))?;
            if !coefficient.is_finite() {
                return Err(ObservableError::InvalidCoefficient(c.to_string()));
            }
            (coefficient, l.trim())
        }
        None => (1.0, text),
    };
    if let Some(c) = label.chars().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
        return Err(ObservableError::InvalidCharacter(c));
    }
    if label.is_empty() {
        return Err(ObservableError::Empty);
    }
    Ok(PauliObservable {
        label: label.to_string(),
        coefficient,
    })
}
