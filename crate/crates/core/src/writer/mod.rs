//! Conceptual circuit writing: boolean-expression phase oracles, Grover search
//! and common building blocks expanded into validated circuits, plus code
//! snippets for the result.

mod expr;
mod oracle;
mod snippet;
mod synth;

pub use crate::circuit::{parse_pauli_observable, ObservableError, PauliObservable};
pub use expr::{parse_bool_expr, BooleanExpr, ExprError, MAX_VARIABLES};
pub use oracle::{compile_phase_oracle, OracleError, PhaseOracle};
pub use snippet::{emit_snippet, SnippetDialect, SnippetError};
pub use synth::{default_grover_iterations, synthesize, ConceptualOp, ConceptualSpec};
