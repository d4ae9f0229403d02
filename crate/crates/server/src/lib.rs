//! HTTP/JSON facade over uploaded logs.
//!
//! Logs live in memory as immutable snapshots keyed by a server-generated
//! token. Uploading is the only mutation; every other endpoint reads a
//! snapshot, so repeated queries return identical bodies.
//!
//! | method | path                              |
//! |--------|-----------------------------------|
//! | POST   | `/logs`                           |
//! | GET    | `/logs/{id}/grid?sort=&w=&h=`     |
//! | GET    | `/logs/{id}/objects/{oid}`        |
//! | GET    | `/logs/{id}/stats?by=&k=&kind=`   |
//! | GET    | `/logs/{id}/threads`              |
//!
//! Response shapes are documented in `docs/api.md`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use objgrid_core::{
    build_cells, count_by, legend, object_detail, parse_csv, thread_profile, top_k, EventKind,
    CellView, EventLog, GridLayout, LegendEntry, SortKey, Viewport,
};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

pub const DEFAULT_WIDTH: u32 = 1024;
pub const DEFAULT_HEIGHT: u32 = 768;
pub const DEFAULT_TOP: usize = 10;

const MAX_UPLOAD: usize = 1 << 30;
const TOKEN_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogHandle {
    pub id: String,
    pub source_name: String,
    pub event_count: usize,
    pub created_count: usize,
}

struct Snapshot {
    #[cfg_attr(not(test), allow(dead_code))]
    handle: LogHandle,
    log: EventLog,
}

#[derive(Clone, Default)]
pub struct AppState {
    logs: Arc<RwLock<HashMap<String, Arc<Snapshot>>>>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Publishes a parsed log and returns its handle.
    pub fn insert(&self, log: EventLog) -> LogHandle {
        let mut logs = self.logs.write().expect("log store poisoned");
        let id = loop {
            let candidate = new_token();
            if !logs.contains_key(&candidate) {
                break candidate;
            }
        };
        let handle = LogHandle {
            id: id.clone(),
            source_name: log.source_name().to_owned(),
            event_count: log.len(),
            created_count: log.count_kind(EventKind::Created),
        };
        logs.insert(id, Arc::new(Snapshot { handle: handle.clone(), log }));
        handle
    }

    fn get(&self, id: &str) -> Result<Arc<Snapshot>, ApiError> {
        self.logs
            .read()
            .expect("log store poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("no log with id {id:?}")))
    }
}

fn new_token() -> String {
    const ALPHABET: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";
    let mut rng = rand::rng();
    (0..TOKEN_LEN)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())] as char)
        .collect()
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest(String),
    MalformedRow { line: usize, reason: String },
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            Self::NotFound(message) => (StatusCode::NOT_FOUND, json!({"error": "not_found", "message": message})),
            Self::BadRequest(message) => (StatusCode::BAD_REQUEST, json!({"error": "bad_request", "message": message})),
            Self::MalformedRow { line, reason } => (
                StatusCode::BAD_REQUEST,
                json!({"error": "malformed_row", "line": line, "reason": reason}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

type Params = Query<HashMap<String, String>>;

fn param<T: std::str::FromStr>(params: &HashMap<String, String>, name: &str, default: T) -> Result<T, ApiError> {
    match params.get(name) {
        None => Ok(default),
        Some(raw) => raw
            .parse()
            .map_err(|_| ApiError::BadRequest(format!("invalid value {raw:?} for `{name}`"))),
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/logs", post(upload_log))
        .route("/logs/{id}/grid", get(get_grid))
        .route("/logs/{id}/objects/{oid}", get(get_object))
        .route("/logs/{id}/stats", get(get_stats))
        .route("/logs/{id}/threads", get(get_threads))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(state)
}

async fn upload_log(
    State(state): State<AppState>,
    Query(params): Params,
    body: String,
) -> Result<(StatusCode, Json<LogHandle>), ApiError> {
    let name = params.get("name").cloned().unwrap_or_else(|| "upload".to_owned());
    let log = parse_csv(&body, name).map_err(|e| ApiError::MalformedRow {
        line: e.line,
        reason: e.fault.to_string(),
    })?;
    Ok((StatusCode::CREATED, Json(state.insert(log))))
}

#[derive(Serialize)]
struct LayoutBody {
    width: u32,
    height: u32,
    cell_side: u32,
    columns: u32,
    rows: u64,
    count: usize,
    content_height: u64,
}

impl From<&GridLayout> for LayoutBody {
    fn from(l: &GridLayout) -> Self {
        Self {
            width: l.viewport.width,
            height: l.viewport.height,
            cell_side: l.cell_side,
            columns: l.columns,
            rows: l.rows,
            count: l.count,
            content_height: l.content_height(),
        }
    }
}

#[derive(Serialize)]
struct GridBody<'a> {
    sort: SortKey,
    layout: LayoutBody,
    cells: &'a [CellView],
    legend: &'a [LegendEntry],
}

async fn get_grid(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> Result<Response, ApiError> {
    let snapshot = state.get(&id)?;
    let sort: SortKey = param(&params, "sort", SortKey::None)?;
    let width = param(&params, "w", DEFAULT_WIDTH)?;
    let height = param(&params, "h", DEFAULT_HEIGHT)?;
    let viewport = Viewport::new(width, height)
        .ok_or_else(|| ApiError::BadRequest("w and h must be at least 1".into()))?;

    let body = tokio::task::spawn_blocking(move || {
        let log = &snapshot.log;
        let (layout, cells) = build_cells(log, sort, viewport);
        // unsorted grids are colored by type, so that is what their legend lists
        let legend_key = if sort == SortKey::None { SortKey::Type } else { sort };
        let legend = legend(log, legend_key).expect("legend key is never none");
        serde_json::to_vec(&GridBody {
            sort,
            layout: LayoutBody::from(&layout),
            cells: &cells,
            legend: &legend,
        })
    })
    .await
    .expect("grid task panicked")
    .expect("grid serializes");
    Ok(([(axum::http::header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn get_object(
    State(state): State<AppState>,
    Path((id, oid)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let snapshot = state.get(&id)?;
    let detail = object_detail(&snapshot.log, &oid)
        .ok_or_else(|| ApiError::NotFound(format!("no object with id {oid:?}")))?;
    Ok(Json(detail).into_response())
}

#[derive(Serialize)]
struct StatsEntry {
    value: String,
    count: u64,
}

async fn get_stats(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Params,
) -> Result<Response, ApiError> {
    let snapshot = state.get(&id)?;
    let by: SortKey = param(&params, "by", SortKey::Class)?;
    let k: usize = param(&params, "k", DEFAULT_TOP)?;
    if k == 0 {
        return Err(ApiError::BadRequest("k must be at least 1".into()));
    }
    let kind = match params.get("kind").map(String::as_str) {
        None | Some("created") => EventKind::Created,
        Some("destroyed") => EventKind::Destroyed,
        Some(other) => return Err(ApiError::BadRequest(format!("invalid value {other:?} for `kind`"))),
    };
    let table = count_by(&snapshot.log, by, kind)
        .map_err(|_| ApiError::BadRequest("`by` must not be none".into()))?;
    let entries: Vec<StatsEntry> = top_k(&table, k)
        .into_iter()
        .map(|(value, count)| StatsEntry { value, count })
        .collect();
    Ok(Json(json!({
        "by": by,
        "kind": kind,
        "k": k,
        "total": table.total(),
        "distinct": table.len(),
        "entries": entries,
    }))
    .into_response())
}

async fn get_threads(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snapshot = state.get(&id)?;
    Ok(Json(thread_profile(&snapshot.log)).into_response())
}

/// Serves until ctrl-c.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
