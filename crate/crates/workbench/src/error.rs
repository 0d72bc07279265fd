use qcwb_core::catalog::CatalogError;
use qcwb_core::simulator::SimError;
use qcwb_core::transpiler::TranspileError;
use qcwb_core::{Diagnostic, Diagnostics};
use serde::Serialize;

/// Failure of a workbench operation, classified the way clients need it:
/// bad input shape, unknown machine, or a well-formed request the engine
/// rejects with diagnostics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorkbenchError {
    #[error("malformed request: {0}")]
    Malformed(String),
    #[error("unknown machine '{0}'")]
    UnknownMachine(String),
    #[error("{}", first_error(.0))]
    Rejected(Diagnostics),
    #[error("machine catalog unavailable: {0}")]
    CatalogUnavailable(String),
    #[error("internal error: {0}")]
    Internal(String),
}

fn first_error(d: &Diagnostics) -> String {
    d.errors()
        .next()
        .or_else(|| d.iter().next())
        .map(|e| e.message.clone())
        .unwrap_or_else(|| "request rejected".to_string())
}

/// JSON body sent with every non-2xx response.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub error: String,
    pub diagnostics: Diagnostics,
}

impl WorkbenchError {
    pub fn rejected(code: &str, message: impl Into<String>) -> Self {
        WorkbenchError::Rejected(Diagnostic::error(code, message).into())
    }

    pub fn diagnostics(&self) -> Diagnostics {
        match self {
            WorkbenchError::Rejected(d) => d.clone(),
            WorkbenchError::Malformed(_) => Diagnostic::error("malformed", self.to_string()).into(),
            WorkbenchError::UnknownMachine(_) => Diagnostic::error("unknown_machine", self.to_string()).into(),
            WorkbenchError::CatalogUnavailable(_) => Diagnostic::error("catalog", self.to_string()).into(),
            WorkbenchError::Internal(_) => Diagnostic::error("internal", self.to_string()).into(),
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error: self.to_string(),
            diagnostics: self.diagnostics(),
        }
    }
}

impl From<TranspileError> for WorkbenchError {
    fn from(e: TranspileError) -> Self {
        WorkbenchError::Rejected(e.to_diagnostics())
    }
}

impl From<SimError> for WorkbenchError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::ThreadPool(msg) => WorkbenchError::Internal(msg),
            other => WorkbenchError::rejected("simulation", other.to_string()),
        }
    }
}

impl From<CatalogError> for WorkbenchError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::UnknownMachine(name) => WorkbenchError::UnknownMachine(name),
            other => WorkbenchError::CatalogUnavailable(other.to_string()),
        }
    }
}
