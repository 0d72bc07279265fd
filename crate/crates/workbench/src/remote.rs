//! Optional remote machine source: one HTTP GET returning a machine
//! document in the same schema as the catalog files (for example another
//! workbench's `GET /machines/{name}`). Plain `http://` only; this build
//! carries no TLS stack.

use qcwb_core::catalog::{parse_machine, MachineProperties};
use qcwb_core::Diagnostics;

use crate::error::WorkbenchError;

/// Fetches and validates one machine document.
pub async fn fetch_machine(url: &str) -> Result<(MachineProperties, Diagnostics), WorkbenchError> {
    let unavailable = |e: reqwest::Error| WorkbenchError::CatalogUnavailable(format!("fetching {url}: {e}"));
    let response = reqwest::get(url).await.map_err(unavailable)?;
    let status = response.status();
    if !status.is_success() {
        return Err(WorkbenchError::CatalogUnavailable(format!("fetching {url}: HTTP {status}")));
    }
    let text = response.text().await.map_err(unavailable)?;
    parse_machine(&text).map_err(WorkbenchError::Rejected)
}

/// Blocking wrapper for callers outside an async runtime.
pub fn fetch_machine_blocking(url: &str) -> Result<(MachineProperties, Diagnostics), WorkbenchError> {
    tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| WorkbenchError::Internal(e.to_string()))?
        .block_on(fetch_machine(url))
}
