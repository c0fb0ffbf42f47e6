//! JSON API over the compile/check/verify/batch operations.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::cors::{Any, CorsLayer};
use veriodd::parse::{parse_cod_stream, DiagnosticKind};
use veriodd::smtlib::AssembleError;
use veriodd::{
    check_consistency, emit_cod_prop, emit_cod_smtlib, emit_odd_prop, emit_odd_smtlib, parse_cod, parse_odd,
    run_batch, verify_cod, BatchReport, CheckResult, CodSpec, Diagnostic, EngineError, OddSpec, SolverConfig,
    SolverError, SourceDoc,
};

use crate::commands::binding_text;
use crate::select::{select_modules, SelectError};

#[derive(Debug, Clone)]
pub struct AppState {
    config: Arc<SolverConfig>,
    permits: Arc<Semaphore>,
}

impl AppState {
    /// `max_solvers` bounds concurrent solver processes; waiting requests
    /// are served in arrival order.
    pub fn new(config: SolverConfig, max_solvers: usize) -> Self {
        Self { config: Arc::new(config), permits: Arc::new(Semaphore::new(max_solvers.max(1))) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ApiErrorCode {
    ParseError,
    SortError,
    UnknownModule,
    SolverError,
    Timeout,
    BadRequest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Document {
    Odd,
    Cod,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiDiagnostic {
    pub document: Document,
    #[serde(flatten)]
    pub diagnostic: Diagnostic,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: ApiErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<ApiDiagnostic>>,
}

impl ApiError {
    fn new(status: StatusCode, code: ApiErrorCode, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into(), diagnostics: None }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, ApiErrorCode::BadRequest, message)
    }

    fn invalid(document: Document, diagnostics: Vec<Diagnostic>) -> Self {
        let sort = diagnostics.iter().any(|d| d.kind == DiagnosticKind::Sort);
        let (code, what) = if sort { (ApiErrorCode::SortError, "ill-sorted") } else { (ApiErrorCode::ParseError, "invalid") };
        let name = match document {
            Document::Odd => "ODD",
            Document::Cod => "COD",
        };
        Self {
            status: StatusCode::BAD_REQUEST,
            code,
            message: format!("{what} {name}: {}", diagnostics[0]),
            diagnostics: Some(diagnostics.into_iter().map(|diagnostic| ApiDiagnostic { document, diagnostic }).collect()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

impl From<SelectError> for ApiError {
    fn from(e: SelectError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ApiErrorCode::UnknownModule, e.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match &e {
            EngineError::Assemble(AssembleError::UnknownModule(_) | AssembleError::NoModuleSelected) => {
                ApiError::new(StatusCode::BAD_REQUEST, ApiErrorCode::UnknownModule, e.to_string())
            }
            EngineError::Solver(SolverError::SolverTimeout { .. }) => {
                ApiError::new(StatusCode::GATEWAY_TIMEOUT, ApiErrorCode::Timeout, e.to_string())
            }
            EngineError::Solver(_) => ApiError::new(StatusCode::BAD_GATEWAY, ApiErrorCode::SolverError, e.to_string()),
        }
    }
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn odd_from(text: &str) -> Result<OddSpec, ApiError> {
    parse_odd(&SourceDoc::new(text, "odd")).map_err(|d| ApiError::invalid(Document::Odd, d))
}

fn cod_from(text: &str, odd: &OddSpec) -> Result<CodSpec, ApiError> {
    parse_cod(&SourceDoc::new(text, "cod"), odd.symbols()).map_err(|d| ApiError::invalid(Document::Cod, d))
}

/// Runs blocking engine work on the blocking pool while holding one solver
/// permit.
async fn with_solver<T, F>(state: &AppState, work: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&SolverConfig) -> Result<T, ApiError> + Send + 'static,
{
    let permit = state.permits.clone().acquire_owned().await.expect("semaphore is never closed");
    let config = state.config.clone();
    let out = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        work(&config)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, ApiErrorCode::SolverError, e.to_string()))?;
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRequest {
    odd: String,
    cod: Option<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModuleInfo {
    pub name: String,
    pub references: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AttributeInfo {
    pub name: String,
    pub sort: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParseResponse {
    pub modules: Vec<ModuleInfo>,
    pub attributes: Vec<AttributeInfo>,
    pub top_level: Option<String>,
}

async fn parse_handler(bytes: Bytes) -> Result<Json<ParseResponse>, ApiError> {
    let req: ParseRequest = body(&bytes)?;
    let odd = odd_from(&req.odd)?;
    if let Some(cod) = &req.cod {
        cod_from(cod, &odd)?;
    }
    Ok(Json(ParseResponse {
        modules: odd
            .modules()
            .map(|m| ModuleInfo {
                name: m.name.clone(),
                references: m.references().into_iter().map(str::to_string).collect(),
            })
            .collect(),
        attributes: odd
            .symbols()
            .values()
            .map(|d| AttributeInfo { name: d.name.clone(), sort: d.sort.to_string(), unit: d.unit.clone() })
            .collect(),
        top_level: odd.top_level().map(str::to_string),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Target {
    Smtlib,
    Prop,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompileRequest {
    odd: String,
    cod: Option<String>,
    target: Target,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompileResponse {
    pub odd_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cod_text: Option<String>,
}

async fn compile_handler(bytes: Bytes) -> Result<Json<CompileResponse>, ApiError> {
    let req: CompileRequest = body(&bytes)?;
    let odd = odd_from(&req.odd)?;
    let cod = req.cod.as_deref().map(|c| cod_from(c, &odd)).transpose()?;
    let (odd_text, cod_text) = match req.target {
        Target::Smtlib => (emit_odd_smtlib(&odd), cod.as_ref().map(emit_cod_smtlib)),
        Target::Prop => (emit_odd_prop(&odd), cod.as_ref().map(emit_cod_prop)),
    };
    Ok(Json(CompileResponse { odd_text, cod_text }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckRequest {
    odd: String,
    #[serde(default)]
    modules: Vec<String>,
    #[serde(default)]
    model: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyRequest {
    odd: String,
    cod: String,
    #[serde(default)]
    modules: Vec<String>,
    #[serde(default)]
    model: bool,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Binding {
    pub name: String,
    pub sort: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResponse {
    pub verdict: veriodd::CheckVerdict,
    pub solver_verdict: veriodd::SolverVerdict,
    pub modules: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<Binding>>,
    pub wall_ms: f64,
    pub script: String,
}

fn project(result: CheckResult, odd: &OddSpec) -> CheckResponse {
    let model = result.outcome.model.as_ref().map(|m| {
        odd.symbols()
            .values()
            .filter_map(|d| {
                m.get(&d.name).map(|v| Binding { name: d.name.clone(), sort: d.sort.to_string(), value: binding_text(v, d.sort) })
            })
            .collect()
    });
    CheckResponse {
        verdict: result.verdict,
        solver_verdict: result.outcome.verdict,
        modules: result.modules,
        model,
        wall_ms: result.outcome.wall_time.as_secs_f64() * 1000.0,
        script: result.script,
    }
}

async fn check_handler(State(state): State<AppState>, bytes: Bytes) -> Result<Json<CheckResponse>, ApiError> {
    let req: CheckRequest = body(&bytes)?;
    let odd = odd_from(&req.odd)?;
    let modules = select_modules(&odd, &req.modules)?;
    let response = with_solver(&state, move |config| {
        let result = check_consistency(&odd, &modules, config, req.model)?;
        Ok(project(result, &odd))
    })
    .await?;
    Ok(Json(response))
}

async fn verify_handler(State(state): State<AppState>, bytes: Bytes) -> Result<Json<CheckResponse>, ApiError> {
    let req: VerifyRequest = body(&bytes)?;
    let odd = odd_from(&req.odd)?;
    let cod = cod_from(&req.cod, &odd)?;
    let modules = select_modules(&odd, &req.modules)?;
    let response = with_solver(&state, move |config| {
        let result = verify_cod(&odd, &cod, &modules, config, req.model)?;
        Ok(project(result, &odd))
    })
    .await?;
    Ok(Json(response))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchRequest {
    odd: String,
    cods: String,
    #[serde(default)]
    modules: Vec<String>,
}

async fn batch_handler(State(state): State<AppState>, bytes: Bytes) -> Result<Json<BatchReport>, ApiError> {
    let req: BatchRequest = body(&bytes)?;
    let odd = odd_from(&req.odd)?;
    let cods = parse_cod_stream(&req.cods, "cods", odd.symbols()).map_err(|d| ApiError::invalid(Document::Cod, d))?;
    let modules = select_modules(&odd, &req.modules)?;
    let report = with_solver(&state, move |config| Ok(run_batch(&odd, &cods, &modules, config, 1)?)).await?;
    Ok(Json(report))
}

#[derive(Debug, Serialize)]
pub struct SolverHealth {
    pub path: String,
    pub reachable: bool,
}

#[derive(Debug, Serialize)]
pub struct Health {
    pub status: &'static str,
    pub solver: SolverHealth,
}

async fn health_handler(State(state): State<AppState>) -> Json<Health> {
    let config = state.config.clone();
    let path = config.executable.display().to_string();
    let reachable = tokio::task::spawn_blocking(move || config.is_reachable()).await.unwrap_or(false);
    Json(Health { status: "ok", solver: SolverHealth { path, reachable } })
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, ApiErrorCode::BadRequest, "no such endpoint")
}

/// The API router. `cors_origin` restricts cross-origin access to one
/// origin; any origin is allowed when it is `None`.
pub fn router(state: AppState, cors_origin: Option<&str>) -> Result<Router, String> {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match cors_origin {
        Some(origin) => cors.allow_origin(
            HeaderValue::from_str(origin).map_err(|e| format!("invalid CORS origin `{origin}`: {e}"))?,
        ),
        None => cors.allow_origin(Any),
    };
    Ok(Router::new()
        .route("/api/parse", post(parse_handler))
        .route("/api/compile", post(compile_handler))
        .route("/api/check", post(check_handler))
        .route("/api/verify", post(verify_handler))
        .route("/api/batch", post(batch_handler))
        .route("/api/health", get(health_handler))
        .fallback(not_found)
        .layer(cors)
        .with_state(state))
}
