//! HTTP API consumed by the web front end. All bodies are JSON; errors use
//! [`ErrorBody`] with 400 for malformed input, 404 for unknown machines and
//! 422 for requests the engine rejects with diagnostics.

use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use qcwb_core::catalog::{load_catalog, Catalog, FileReport, MachineProperties};
use qcwb_core::circuit::CircuitDocument;
use qcwb_core::writer::{ConceptualSpec, SnippetDialect};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::config::ServiceConfig;
use crate::error::{ErrorBody, WorkbenchError};
use crate::ops;
use crate::viewmodel::build_view_model;

/// Loaded catalog, or why loading failed.
type CatalogSlot = Result<Arc<Catalog>, String>;

#[derive(Clone)]
pub struct AppState {
    catalog: Arc<RwLock<CatalogSlot>>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    /// Loads the catalog directory named in `config`. A failed load is kept
    /// and reported by the catalog endpoints instead of aborting startup.
    pub fn new(config: ServiceConfig) -> Self {
        let slot = load_slot(&config.catalog_dir);
        Self {
            catalog: Arc::new(RwLock::new(slot)),
            config: Arc::new(config),
        }
    }

    pub fn with_catalog(config: ServiceConfig, catalog: Catalog) -> Self {
        Self {
            catalog: Arc::new(RwLock::new(Ok(Arc::new(catalog)))),
            config: Arc::new(config),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn catalog(&self) -> Result<Arc<Catalog>, WorkbenchError> {
        self.catalog
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .clone()
            .map_err(WorkbenchError::CatalogUnavailable)
    }

    fn machine(&self, name: &str) -> Result<MachineProperties, WorkbenchError> {
        Ok(self.catalog()?.get(name)?.clone())
    }

    /// Re-reads the catalog directory and swaps it in atomically.
    pub fn reload(&self) -> CatalogReport {
        let slot = load_slot(&self.config.catalog_dir);
        *self.catalog.write().unwrap_or_else(|p| p.into_inner()) = slot.clone();
        CatalogReport::new(&self.config.catalog_dir, &slot)
    }
}

fn load_slot(dir: &std::path::Path) -> CatalogSlot {
    load_catalog(dir).map(Arc::new).map_err(|e| e.to_string())
}

impl IntoResponse for WorkbenchError {
    fn into_response(self) -> Response {
        let status = match self {
            WorkbenchError::Malformed(_) => StatusCode::BAD_REQUEST,
            WorkbenchError::UnknownMachine(_) => StatusCode::NOT_FOUND,
            WorkbenchError::Rejected(_) => StatusCode::UNPROCESSABLE_ENTITY,
            WorkbenchError::CatalogUnavailable(_) => StatusCode::SERVICE_UNAVAILABLE,
            WorkbenchError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.body())).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, WorkbenchError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, WorkbenchError> {
    serde_json::from_slice(body).map_err(|e| WorkbenchError::Malformed(e.to_string()))
}

/// Runs CPU-bound engine work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, WorkbenchError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, WorkbenchError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| WorkbenchError::Internal(e.to_string()))?
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogReport {
    pub directory: PathBuf,
    pub machines: Vec<String>,
    pub files: Vec<FileReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CatalogReport {
    fn new(dir: &std::path::Path, slot: &CatalogSlot) -> Self {
        match slot {
            Ok(c) => Self {
                directory: dir.to_path_buf(),
                machines: c.names().map(str::to_string).collect(),
                files: c.reports.clone(),
                error: None,
            },
            Err(e) => Self {
                directory: dir.to_path_buf(),
                machines: Vec::new(),
                files: Vec::new(),
                error: Some(e.clone()),
            },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnippetRequest {
    pub paths: Vec<String>,
    #[serde(default = "default_dialect")]
    pub dialect: SnippetDialect,
}

fn default_dialect() -> SnippetDialect {
    SnippetDialect::WorkbenchCli
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeRequest {
    pub spec: ConceptualSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitOnMachine {
    pub circuit: CircuitDocument,
    pub machine: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub circuit: CircuitDocument,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorAdjustRequest {
    pub circuit: CircuitDocument,
    pub machine: String,
    pub shots: Option<u64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn list_machines(State(s): State<AppState>) -> ApiResult<Vec<ops::MachineSummary>> {
    Ok(Json(s.catalog()?.machines().map(ops::MachineSummary::from).collect()))
}

async fn get_machine(State(s): State<AppState>, Path(name): Path<String>) -> ApiResult<MachineProperties> {
    Ok(Json(s.machine(&name)?))
}

async fn machine_snippet(
    State(s): State<AppState>,
    Path(name): Path<String>,
    body: Bytes,
) -> ApiResult<ops::SnippetResult> {
    let req: SnippetRequest = parse_body(&body)?;
    let machine = s.machine(&name)?;
    Ok(Json(ops::property_snippet(&machine, &req.paths, req.dialect)?))
}

async fn catalog_report(State(s): State<AppState>) -> Json<CatalogReport> {
    let slot = s.catalog.read().unwrap_or_else(|p| p.into_inner()).clone();
    Json(CatalogReport::new(&s.config.catalog_dir, &slot))
}

async fn reload_catalog(State(s): State<AppState>) -> Json<CatalogReport> {
    Json(s.reload())
}

async fn synthesize(body: Bytes) -> ApiResult<ops::SynthesisResult> {
    let req: SynthesizeRequest = parse_body(&body)?;
    Ok(Json(blocking(move || Ok(ops::synthesize_spec(&req.spec))).await?))
}

async fn transpile(State(s): State<AppState>, body: Bytes) -> ApiResult<ops::TranspileResult> {
    let req: CircuitOnMachine = parse_body(&body)?;
    let machine = s.machine(&req.machine)?;
    let result = blocking(move || {
        let circuit = ops::circuit_from_document(&req.circuit)?;
        ops::transpile_document(&circuit, &machine)
    })
    .await?;
    Ok(Json(result))
}

async fn simulate(State(s): State<AppState>, body: Bytes) -> ApiResult<qcwb_core::simulator::Counts> {
    let req: SimulateRequest = parse_body(&body)?;
    let cfg = s.config.clone();
    let result = blocking(move || {
        let circuit = ops::circuit_from_document(&req.circuit)?;
        ops::simulate(
            &circuit,
            req.shots.unwrap_or(cfg.default_shots),
            req.seed.unwrap_or(cfg.seed),
            &cfg.limits,
        )
    })
    .await?;
    Ok(Json(result))
}

async fn error_adjust(State(s): State<AppState>, body: Bytes) -> ApiResult<ops::ErrorAdjustResult> {
    let req: ErrorAdjustRequest = parse_body(&body)?;
    let machine = s.machine(&req.machine)?;
    let cfg = s.config.clone();
    let result = blocking(move || {
        let circuit = ops::circuit_from_document(&req.circuit)?;
        ops::error_adjust(
            &circuit,
            &machine,
            req.shots.unwrap_or(cfg.default_shots),
            req.trials.unwrap_or(cfg.default_trials),
            req.seed.unwrap_or(cfg.seed),
            None,
            &cfg.limits,
        )
    })
    .await?;
    Ok(Json(result))
}

async fn viewmodel(State(s): State<AppState>, body: Bytes) -> ApiResult<crate::viewmodel::ViewModel> {
    let req: CircuitOnMachine = parse_body(&body)?;
    let machine = s.machine(&req.machine)?;
    let result = blocking(move || {
        let circuit = ops::circuit_from_document(&req.circuit)?;
        build_view_model(&circuit, &machine)
    })
    .await?;
    Ok(Json(result))
}

async fn not_found() -> (StatusCode, Json<ErrorBody>) {
    let e = WorkbenchError::Malformed("no such endpoint".to_string());
    (StatusCode::NOT_FOUND, Json(e.body()))
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/machines", get(list_machines))
        .route("/machines/{name}", get(get_machine))
        .route("/machines/{name}/snippet", post(machine_snippet))
        .route("/catalog", get(catalog_report))
        .route("/catalog/reload", post(reload_catalog))
        .route("/circuits/synthesize", post(synthesize))
        .route("/transpile", post(transpile))
        .route("/simulate", post(simulate))
        .route("/error-adjust", post(error_adjust))
        .route("/viewmodel", post(viewmodel));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    };
    api.with_state(state)
}

/// Binds `0.0.0.0:{port}` and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let port = config.port;
    let app = router(AppState::new(config));
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
