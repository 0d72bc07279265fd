//! Engine for a gate-based quantum-computing workbench.
//!
//! * [`circuit`]: logical IR, documents, OpenQASM, dense-unitary oracle
//! * [`writer`]: conceptual specs and boolean-expression oracles to circuits
//! * [`catalog`]: machine calibration data, synthetic machines, property selection
//! * [`transpiler`]: basis decomposition, routing, layering, provenance, ESP
//! * [`simulator`]: statevector, sampling, Pauli expectation, error adjustment

pub mod catalog;
pub mod circuit;
pub mod diagnostics;
pub mod simulator;
pub mod transpiler;
pub mod writer;

pub use diagnostics::{Diagnostic, Diagnostics, Severity};
