//! Workbench service on top of `qcwb-core`: the HTTP API used by the web
//! front end, the `qcwb` command line, and the circuit-viewer model.

pub mod api;
pub mod cli;
pub mod config;
pub mod error;
pub mod ops;
pub mod remote;
pub mod viewmodel;

pub use config::{Limits, ServiceConfig};
pub use error::{ErrorBody, WorkbenchError};
