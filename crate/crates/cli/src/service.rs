//! HTTP API over an in-memory workspace of datasets, their scaffold sets and
//! the structure built from them.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use scaffold_core::dataset::{ingest_with, Dataset, Format, IngestError, IngestOptions, DEFAULT_MAX_ROWS};
use scaffold_core::diagnostic::{has_errors, Code, Diagnostic};
use scaffold_core::gateway::{
    generate_validated, open_backend, BackendConfig, GatewayError, GenerationConfig,
};
use scaffold_core::predicate::{parse_predicate, select, typecheck};
use scaffold_core::scaffold::{ScaffoldKind, ScaffoldSet};
use scaffold_core::structure::{build_structure, StructureError, StructureNode, PAGE_SIZE};

pub const DEFAULT_PORT: u16 = 7341;
const MAX_BODY_BYTES: usize = 64 * 1024 * 1024;
const MAX_PAGE_SIZE: usize = 1000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Where mock fixtures named by `mockFixture` live.
    pub fixtures_dir: PathBuf,
    /// Snapshot directory; `None` keeps everything in memory.
    pub state_dir: Option<PathBuf>,
    pub max_rows: usize,
    /// Used when a request names no mock fixture.
    pub generation: GenerationConfig,
}

impl ServiceConfig {
    pub fn new(fixtures_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            fixtures_dir: fixtures_dir.into(),
            state_dir: None,
            max_rows: DEFAULT_MAX_ROWS,
            generation: GenerationConfig::default(),
        }
    }
}

/// What gets written to `{state_dir}/{datasetId}.json`.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Snapshot {
    dataset: Dataset,
    bin_sets: IndexMap<String, ScaffoldSet>,
    highlights: Option<ScaffoldSet>,
}

/// One dataset with its accepted scaffold sets. The structure is rebuilt
/// whenever an entry is made, so it always matches the sets.
struct Entry {
    dataset: Arc<Dataset>,
    bin_sets: IndexMap<String, ScaffoldSet>,
    highlights: Option<ScaffoldSet>,
    structure: StructureNode,
}

impl Entry {
    fn new(
        dataset: Arc<Dataset>,
        bin_sets: IndexMap<String, ScaffoldSet>,
        highlights: Option<ScaffoldSet>,
    ) -> Result<Entry, StructureError> {
        let structure = build_structure(&dataset, &bin_sets, highlights.as_ref())?;
        Ok(Entry { dataset, bin_sets, highlights, structure })
    }

    fn with_set(&self, set: ScaffoldSet) -> Result<Entry, StructureError> {
        let mut bin_sets = self.bin_sets.clone();
        let mut highlights = self.highlights.clone();
        match &set.kind {
            ScaffoldKind::Bins { field } => {
                bin_sets.insert(field.clone(), set);
            }
            ScaffoldKind::Highlights => highlights = Some(set),
        }
        Entry::new(self.dataset.clone(), bin_sets, highlights)
    }

    fn snapshot_json(&self) -> String {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct SnapshotRef<'a> {
            dataset: &'a Dataset,
            bin_sets: &'a IndexMap<String, ScaffoldSet>,
            highlights: &'a Option<ScaffoldSet>,
        }
        serde_json::to_string(&SnapshotRef {
            dataset: &self.dataset,
            bin_sets: &self.bin_sets,
            highlights: &self.highlights,
        })
        .expect("snapshots serialize")
    }
}

pub struct AppState {
    config: ServiceConfig,
    entries: RwLock<BTreeMap<String, Arc<Entry>>>,
}

impl AppState {
    /// Starts a workspace, loading any snapshots found in the state dir.
    pub fn new(config: ServiceConfig) -> std::io::Result<Arc<AppState>> {
        let mut entries = BTreeMap::new();
        if let Some(dir) = &config.state_dir {
            std::fs::create_dir_all(dir)?;
            for item in std::fs::read_dir(dir)? {
                let path = item?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                match load_snapshot(&path) {
                    Ok(entry) => {
                        entries.insert(entry.dataset.id().to_string(), Arc::new(entry));
                    }
                    Err(e) => tracing::warn!(path = %path.display(), "skipping snapshot: {e}"),
                }
            }
        }
        Ok(Arc::new(AppState { config, entries: RwLock::new(entries) }))
    }

    fn get(&self, id: &str) -> Result<Arc<Entry>, ApiError> {
        self.entries
            .read()
            .expect("workspace lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn persist(&self, entry: &Entry) -> Result<(), ApiError> {
        let Some(dir) = &self.config.state_dir else { return Ok(()) };
        let path = dir.join(format!("{}.json", entry.dataset.id()));
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, entry.snapshot_json())
            .and_then(|_| std::fs::rename(&tmp, &path))
            .map_err(|e| ApiError::internal(format!("could not write {}: {e}", path.display())))
    }

    fn forget(&self, id: &str) -> Result<(), ApiError> {
        let Some(dir) = &self.config.state_dir else { return Ok(()) };
        match std::fs::remove_file(dir.join(format!("{id}.json"))) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => {
                Err(ApiError::internal(format!("could not remove snapshot of {id}: {e}")))
            }
            _ => Ok(()),
        }
    }
}

fn load_snapshot(path: &Path) -> Result<Entry, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let snap: Snapshot = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Entry::new(Arc::new(snap.dataset), snap.bin_sets, snap.highlights).map_err(|e| e.to_string())
}

// ---- responses ------------------------------------------------------------

fn json_body(status: StatusCode, body: &impl Serialize) -> Response {
    let text = serde_json::to_string(body).expect("response bodies serialize");
    (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    diagnostics: Vec<Diagnostic>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into(), diagnostics: Vec::new() }
    }

    fn bad_request(message: impl Into<String>, diagnostics: Vec<Diagnostic>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: message.into(), diagnostics }
    }

    fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("no dataset {id:?}"))
    }

    fn internal(message: String) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_body(self.status, &json!({ "error": self.message, "diagnostics": self.diagnostics }))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        let msg = format!("request body: {e}");
        ApiError::bad_request(msg.clone(), vec![Diagnostic::error(Code::SchemaViolation, msg)])
    })
}

// ---- handlers -------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewDataset {
    format: String,
    content: String,
}

async fn create_dataset(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: NewDataset = read_json(&body)?;
    let format: Format = req.format.parse().map_err(|e: String| ApiError::bad_request(e, Vec::new()))?;
    let options = IngestOptions { max_rows: state.config.max_rows };
    let dataset = ingest_with(req.content.as_bytes(), format, options).map_err(|e| match e {
        IngestError::TooManyRows { .. } => ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, e.to_string()),
        other => ApiError::bad_request(other.to_string(), Vec::new()),
    })?;
    let id = dataset.id().to_string();
    let existing = state.entries.read().expect("workspace lock").get(&id).cloned();
    let entry = match existing {
        // same content, same id: keep the scaffolds already generated for it
        Some(entry) => entry,
        None => {
            let entry = Arc::new(
                Entry::new(Arc::new(dataset), IndexMap::new(), None)
                    .map_err(|e| ApiError::internal(e.to_string()))?,
            );
            state.persist(&entry)?;
            state.entries.write().expect("workspace lock").insert(id, entry.clone());
            entry
        }
    };
    Ok(json_body(StatusCode::CREATED, &entry.dataset.summary_json()))
}

fn describe_entry(entry: &Entry) -> Value {
    let mut summary = entry.dataset.summary_json();
    summary["binSets"] = serde_json::to_value(&entry.bin_sets).expect("sets serialize");
    summary["highlights"] = serde_json::to_value(&entry.highlights).expect("sets serialize");
    summary
}

async fn get_dataset(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    Ok(json_body(StatusCode::OK, &describe_entry(&entry)))
}

async fn delete_dataset(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let removed = state.entries.write().expect("workspace lock").remove(&id);
    if removed.is_none() {
        return Err(ApiError::not_found(&id));
    }
    state.forget(&id)?;
    Ok(json_body(StatusCode::OK, &json!({ "deleted": id })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ScaffoldRequest {
    kind: String,
    field: Option<String>,
    mock_fixture: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ScaffoldResponse {
    scaffolds: ScaffoldSet,
    diagnostics: Vec<Diagnostic>,
    attempts_used: u32,
    accepted: bool,
}

fn gateway_error(e: GatewayError, mock_fixture: Option<&str>) -> ApiError {
    match e {
        GatewayError::UnknownField(f) => {
            let msg = format!("unknown field {f:?}");
            ApiError::bad_request(msg.clone(), vec![Diagnostic::error(Code::UnknownField, msg)])
        }
        GatewayError::Fixture(m) => {
            tracing::warn!("mock fixture: {m}");
            let id = mock_fixture.unwrap_or_default();
            ApiError::bad_request(format!("mock fixture {id:?} is missing or unreadable"), Vec::new())
        }
        GatewayError::Response(r) => ApiError {
            status: StatusCode::BAD_GATEWAY,
            message: r.to_string(),
            diagnostics: vec![r.to_diagnostic()],
        },
        other => ApiError::new(StatusCode::BAD_GATEWAY, other.to_string()),
    }
}

async fn generate_scaffolds(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    let req: ScaffoldRequest = read_json(&body)?;
    let task = match (req.kind.as_str(), req.field) {
        ("bins", Some(field)) => ScaffoldKind::Bins { field },
        ("highlights", None) => ScaffoldKind::Highlights,
        ("bins", None) => return Err(ApiError::bad_request("bins need a \"field\"", Vec::new())),
        ("highlights", Some(_)) => {
            return Err(ApiError::bad_request("highlights do not take a \"field\"", Vec::new()))
        }
        (other, _) => {
            return Err(ApiError::bad_request(
                format!("unknown kind {other:?} (expected bins or highlights)"),
                Vec::new(),
            ))
        }
    };
    let mut cfg = state.config.generation.clone();
    if let Some(fixture_id) = req.mock_fixture.clone() {
        cfg.backend = BackendConfig::Mock { fixture_id };
    }

    let dataset = entry.dataset.clone();
    let fixtures = state.config.fixtures_dir.clone();
    let job_task = task.clone();
    let generation = tokio::task::spawn_blocking(move || {
        let backend = open_backend(&cfg, &fixtures)?;
        generate_validated(backend.as_ref(), &dataset, &job_task, &cfg)
    })
    .await
    .map_err(|e| ApiError::internal(format!("generation task failed: {e}")))?
    .map_err(|e| gateway_error(e, req.mock_fixture.as_deref()))?;

    let accepted = !has_errors(&generation.diagnostics);
    if accepted {
        // apply to whatever is current now, not the entry read before generating
        let mut entries = state.entries.write().expect("workspace lock");
        let current = entries.get(&id).cloned().ok_or_else(|| ApiError::not_found(&id))?;
        let updated = Arc::new(
            current
                .with_set(generation.set.clone())
                .map_err(|e| ApiError::internal(e.to_string()))?,
        );
        state.persist(&updated)?;
        entries.insert(id, updated);
    }
    Ok(json_body(
        StatusCode::OK,
        &ScaffoldResponse {
            scaffolds: generation.set,
            diagnostics: generation.diagnostics,
            attempts_used: generation.attempts_used,
            accepted,
        },
    ))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct StructureQuery {
    bin_mode: Option<String>,
}

async fn get_structure(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<StructureQuery>,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    let text = match q.bin_mode.as_deref() {
        None | Some("semantic") => entry.structure.to_json(),
        Some("conventional") => build_structure(&entry.dataset, &IndexMap::new(), entry.highlights.as_ref())
            .map_err(|e| ApiError::internal(e.to_string()))?
            .to_json(),
        Some(other) => {
            return Err(ApiError::bad_request(
                format!("unknown binMode {other:?} (expected semantic or conventional)"),
                Vec::new(),
            ))
        }
    };
    Ok((StatusCode::OK, [(header::CONTENT_TYPE, "application/json")], text).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PageQuery {
    page: Option<usize>,
    page_size: Option<usize>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SelectionResponse {
    count: usize,
    row_indices: Vec<usize>,
    rows_page: Vec<Value>,
    page: usize,
    page_size: usize,
}

async fn post_selection(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<PageQuery>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let entry = state.get(&id)?;
    let page = q.page.unwrap_or(0);
    let page_size = q.page_size.unwrap_or(PAGE_SIZE);
    if page_size == 0 || page_size > MAX_PAGE_SIZE {
        return Err(ApiError::bad_request(format!("pageSize must be between 1 and {MAX_PAGE_SIZE}"), Vec::new()));
    }
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::bad_request(e.to_string(), Vec::new()))?;
    let predicate = parse_predicate(text).map_err(|e| {
        let msg = format!("invalid predicate: {e}");
        ApiError::bad_request(msg.clone(), vec![Diagnostic::error(Code::SchemaViolation, msg)])
    })?;
    let problems = typecheck(&predicate, entry.dataset.fields());
    if has_errors(&problems) {
        return Err(ApiError::bad_request("predicate does not fit the dataset", problems));
    }
    let selection = select(&predicate, &entry.dataset, true).map_err(|e| {
        ApiError::bad_request(e.to_string(), vec![Diagnostic::error(Code::UnknownField, e.to_string())])
    })?;
    let rows_page = selection
        .row_indices
        .iter()
        .skip(page.saturating_mul(page_size))
        .take(page_size)
        .map(|&i| entry.dataset.row(i).to_json())
        .collect();
    Ok(json_body(
        StatusCode::OK,
        &SelectionResponse {
            count: selection.count(),
            row_indices: selection.row_indices,
            rows_page,
            page,
            page_size,
        },
    ))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/datasets", post(create_dataset))
        .route("/api/datasets/{id}", get(get_dataset).delete(delete_dataset))
        .route("/api/datasets/{id}/scaffolds", post(generate_scaffolds))
        .route("/api/datasets/{id}/structure", get(get_structure))
        .route("/api/datasets/{id}/selection", post(post_selection))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> std::io::Result<()> {
    let state = AppState::new(config)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
