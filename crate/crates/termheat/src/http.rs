//! Read-only JSON API over a shared index.
//!
//! Requests load the current index once through an [`ArcSwap`], so a reload
//! swaps the whole index atomically and every request sees exactly one
//! version.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use arc_swap::ArcSwap;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;
use termheat_core::session::{parse_term_list, DocumentItem};
use termheat_core::{
    build_heatmap, drilldown_documents, recommend, CoIndex, Error as CoreError, NormalizedTerm, Scope, DEFAULT_K,
    DEFAULT_M,
};
use tower_http::services::ServeDir;

pub const DEFAULT_PAGE_SIZE: usize = 20;

#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub k: usize,
    pub m: usize,
    pub page_size: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults { k: DEFAULT_K, m: DEFAULT_M, page_size: DEFAULT_PAGE_SIZE }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub index: Arc<ArcSwap<CoIndex>>,
    pub defaults: Defaults,
}

impl AppState {
    pub fn new(index: CoIndex, defaults: Defaults) -> Self {
        AppState { index: Arc::new(ArcSwap::from_pointee(index)), defaults }
    }
}

pub fn router(state: AppState, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/recommend", get(recommend_handler))
        .route("/api/heatmap", get(heatmap_handler))
        .route("/api/documents", get(documents_handler))
        .route("/api/stats", get(stats_handler))
        .with_state(state);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: message.into() }
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::EmptyQuery
            | CoreError::EmptyTerm
            | CoreError::UnknownTerm(_)
            | CoreError::InvalidParameter(_)
            | CoreError::OutOfRange(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(error = %self.message, "request failed");
        }
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type Params = HashMap<String, String>;

fn query_param(params: &Params) -> Result<String, ApiError> {
    match params.get("q") {
        Some(q) if !q.trim().is_empty() => Ok(q.clone()),
        _ => Err(CoreError::EmptyQuery.into()),
    }
}

fn positive(params: &Params, name: &str, default: usize) -> Result<usize, ApiError> {
    match params.get(name) {
        None => Ok(default),
        Some(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(ApiError::bad_request(format!("invalid parameter: {name} must be a positive integer"))),
        },
    }
}

fn flag(params: &Params, name: &str) -> Result<bool, ApiError> {
    match params.get(name).map(|s| s.trim()) {
        None | Some("false") | Some("0") => Ok(false),
        Some("") | Some("true") | Some("1") => Ok(true),
        Some(_) => Err(ApiError::bad_request(format!("invalid parameter: {name} must be true or false"))),
    }
}

fn scope_param(params: &Params, index: &CoIndex) -> Result<Scope, ApiError> {
    let scope = Scope::parse(params.get("scope").map_or("", String::as_str));
    scope.validate(index)?;
    Ok(scope)
}

async fn recommend_handler(State(state): State<AppState>, Query(params): Query<Params>) -> Result<Response, ApiError> {
    let index = state.index.load();
    let q = query_param(&params)?;
    let k = positive(&params, "k", state.defaults.k)?;
    let include_self = flag(&params, "include_self")?;
    let scope = scope_param(&params, &index)?;
    let rec = recommend(&index, &q, k, scope.terms(), include_self)?;
    Ok(Json(rec).into_response())
}

async fn heatmap_handler(State(state): State<AppState>, Query(params): Query<Params>) -> Result<Response, ApiError> {
    let index = state.index.load();
    let q = query_param(&params)?;
    let k = positive(&params, "k", state.defaults.k)?;
    let m = positive(&params, "m", state.defaults.m)?;
    let scope = scope_param(&params, &index)?;
    let map = build_heatmap(&index, &q, k, m, scope.terms())?;
    Ok(Json(map).into_response())
}

#[derive(Serialize)]
struct DocumentsResponse {
    query: String,
    scope: Vec<NormalizedTerm>,
    terms: Vec<NormalizedTerm>,
    total: u64,
    page: usize,
    page_size: usize,
    items: Vec<DocumentItem>,
}

async fn documents_handler(State(state): State<AppState>, Query(params): Query<Params>) -> Result<Response, ApiError> {
    let index = state.index.load();
    let q = query_param(&params)?;
    let page = positive(&params, "page", 1)?;
    let page_size = positive(&params, "page_size", state.defaults.page_size)?;
    let scope = scope_param(&params, &index)?;
    let terms = parse_term_list(params.get("terms").map_or("", String::as_str));
    let result = drilldown_documents(&index, &q, &scope, &terms, page, page_size)?;
    Ok(Json(DocumentsResponse {
        query: q,
        scope: scope.terms().to_vec(),
        terms,
        total: result.total,
        page: result.page,
        page_size: result.page_size,
        items: result.items,
    })
    .into_response())
}

async fn stats_handler(State(state): State<AppState>) -> Response {
    let index = state.index.load();
    Json(json!({ "doc_count": index.doc_count(), "vocab_size": index.vocab_size() })).into_response()
}
