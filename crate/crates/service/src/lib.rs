//! HTTP/JSON front end for acquisition sessions.
//!
//! Each workspace holds one session and a revision counter. Compute
//! endpoints (`score`, `balance`, `evaluate/wilcoxon`, and `recommend`
//! without `accept`) never change anything. Mutations (`pool`,
//! `recommend?accept=true`, `override`) need an `If-Match: <revision>` header
//! naming the revision they were prepared against, and bump it on success.
//! Every response carries the revision it was computed against as its ETag.
//!
//! The workspace is picked by the `X-Workspace` header, `default` if absent.

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use tokio::sync::{Mutex, RwLock};

use teamforge_core::analytics::WilcoxonRequest;
use teamforge_core::profile::ResponseDocument;
use teamforge_core::recommend::{apply_override, recommend, Assignment, OverrideEdit};
use teamforge_core::report::{acquisition_report, completion_report};
use teamforge_core::session::{parse_json, parse_request_list, render_json, save_session, AcquisitionSession};
use teamforge_core::style::score_document;
use teamforge_core::team::Candidate;
use teamforge_core::{Error, Violation};

pub const WORKSPACE_HEADER: &str = "x-workspace";
pub const DEFAULT_WORKSPACE: &str = "default";

pub struct Workspace {
    pub session: AcquisitionSession,
    pub revision: u64,
}

#[derive(Clone)]
pub struct AppState {
    workspaces: Arc<RwLock<HashMap<String, Arc<Mutex<Workspace>>>>>,
    save_path: Option<PathBuf>,
}

impl AppState {
    /// A state holding `session` as the default workspace.
    pub fn new(session: AcquisitionSession, save_path: Option<PathBuf>) -> Self {
        let workspaces = HashMap::from([(DEFAULT_WORKSPACE.to_string(), new_workspace(session))]);
        AppState {
            workspaces: Arc::new(RwLock::new(workspaces)),
            save_path,
        }
    }

    pub async fn insert_workspace(&self, id: &str, session: AcquisitionSession) {
        self.workspaces
            .write()
            .await
            .insert(id.to_string(), new_workspace(session));
    }

    async fn workspace(&self, headers: &HeaderMap) -> Result<Arc<Mutex<Workspace>>, ApiError> {
        let id = headers
            .get(WORKSPACE_HEADER)
            .and_then(|v| v.to_str().ok())
            .unwrap_or(DEFAULT_WORKSPACE);
        self.workspaces
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownWorkspace", format!("unknown workspace {id}")))
    }
}

fn new_workspace(session: AcquisitionSession) -> Arc<Mutex<Workspace>> {
    Arc::new(Mutex::new(Workspace { session, revision: 0 }))
}

pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub session: AcquisitionSession,
    /// Where `POST /api/v1/save` writes the session; saving is disabled
    /// without it.
    pub save_path: Option<PathBuf>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/workspace", get(get_workspace))
        .route("/api/v1/pool", post(post_pool))
        .route("/api/v1/score/{candidate}", post(post_score))
        .route("/api/v1/recommend", post(post_recommend))
        .route("/api/v1/override", post(post_override))
        .route("/api/v1/balance", post(post_balance))
        .route("/api/v1/evaluate/wilcoxon", post(post_wilcoxon))
        .route("/api/v1/report/{kind}", get(get_report))
        .route("/api/v1/save", post(post_save))
        .with_state(state)
}

pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    let state = AppState::new(config.session, config.save_path);
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    revision: Option<u64>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: kind.to_string(),
                message: message.into(),
                violations: Vec::new(),
                revision: None,
            },
        }
    }

    fn bad_request(kind: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, kind, message)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Validation(_) => "Validation",
        Error::SameTrait => "SameTrait",
        Error::InvalidQuartet(_) => "InvalidQuartet",
        Error::EmptyTeam => "EmptyTeam",
        Error::UnknownCandidate(_) => "UnknownCandidate",
        Error::UnknownPosition(_) => "UnknownPosition",
        Error::UnscoredCandidate(_) => "UnscoredCandidate",
        Error::ConflictingEdit { .. } => "ConflictingEdit",
        Error::InfeasibleChart(_) => "InfeasibleChart",
        Error::InvalidConfig(_) => "InvalidConfig",
        Error::ZeroMonths => "ZeroMonths",
        Error::UnmatchedUnits(_) => "UnmatchedUnits",
        Error::NoObservations => "NoObservations",
        Error::NonFinite(_) => "NonFinite",
        Error::UnknownLevel { .. } => "UnknownLevel",
        Error::NoFinalAssignment => "NoFinalAssignment",
        Error::Parse { .. } => "ParseError",
        Error::SchemaVersionMismatch { .. } => "SchemaVersionMismatch",
        Error::Io(_) => "Io",
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownCandidate(_) | Error::UnknownPosition(_) => StatusCode::NOT_FOUND,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let mut err = ApiError::new(status, error_kind(&e), e.to_string());
        err.body.violations = e.violations().map(<[_]>::to_vec).unwrap_or_default();
        err
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut res = (self.status, render_json(&self.body)).into_response();
        res.headers_mut()
            .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
        if let Some(rev) = self.body.revision {
            set_etag(&mut res, rev);
        }
        res
    }
}

fn set_etag(res: &mut Response, revision: u64) {
    if let Ok(v) = HeaderValue::from_str(&format!("\"{revision}\"")) {
        res.headers_mut().insert(header::ETAG, v);
    }
}

fn respond(revision: u64, content_type: &'static str, body: String) -> Response {
    let mut res = (StatusCode::OK, body).into_response();
    res.headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static(content_type));
    set_etag(&mut res, revision);
    res
}

fn json(revision: u64, value: &impl Serialize) -> Response {
    respond(revision, "application/json", render_json(value))
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let text = std::str::from_utf8(body).map_err(|_| ApiError::bad_request("ParseError", "body is not UTF-8"))?;
    Ok(parse_json(text)?)
}

/// The revision a mutation was prepared against. Required.
fn if_match(headers: &HeaderMap) -> Result<u64, ApiError> {
    let raw = headers
        .get(header::IF_MATCH)
        .ok_or_else(|| ApiError::bad_request("MissingIfMatch", "mutations require an If-Match revision header"))?;
    raw.to_str()
        .ok()
        .map(|s| s.trim().trim_start_matches("W/").trim_matches('"'))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ApiError::bad_request("MissingIfMatch", "If-Match must be a revision number"))
}

fn check_revision(ws: &Workspace, expected: u64) -> Result<(), ApiError> {
    if ws.revision == expected {
        return Ok(());
    }
    let mut e = ApiError::new(
        StatusCode::CONFLICT,
        "RevisionConflict",
        format!("workspace is at revision {}, request was prepared against {expected}", ws.revision),
    );
    e.body.revision = Some(ws.revision);
    Err(e)
}

#[derive(Serialize)]
struct WorkspaceSnapshot<'a> {
    revision: u64,
    session: &'a AcquisitionSession,
}

async fn get_workspace(State(state): State<AppState>, headers: HeaderMap) -> Result<Response, ApiError> {
    let ws = state.workspace(&headers).await?;
    let ws = ws.lock().await;
    Ok(json(
        ws.revision,
        &WorkspaceSnapshot {
            revision: ws.revision,
            session: &ws.session,
        },
    ))
}

#[derive(Serialize)]
struct PoolAccepted {
    revision: u64,
    valid: bool,
    candidates: usize,
}

/// Replaces the candidate pool. Accepts a JSON array of candidates, or a
/// request-list CSV when sent as `text/csv`.
async fn post_pool(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let expected = if_match(&headers)?;
    let is_csv = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("text/csv"));
    let pool: Vec<Candidate> = if is_csv {
        let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("ParseError", "body is not UTF-8"))?;
        parse_request_list(text)?
    } else {
        parse_body(&body)?
    };
    let ws = state.workspace(&headers).await?;
    let mut ws = ws.lock().await;
    check_revision(&ws, expected)?;
    let mut session = ws.session.clone();
    session.set_pool(pool)?;
    ws.session = session;
    ws.revision += 1;
    let n = ws.session.pool.len();
    Ok(json(
        ws.revision,
        &PoolAccepted {
            revision: ws.revision,
            valid: true,
            candidates: n,
        },
    ))
}

async fn post_score(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(candidate): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let ws = state.workspace(&headers).await?;
    let revision = {
        let ws = ws.lock().await;
        if ws.session.candidate(&candidate).is_none() {
            return Err(Error::UnknownCandidate(candidate).into());
        }
        ws.revision
    };
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("ParseError", "body is not UTF-8"))?;
    let doc = ResponseDocument::from_json_str(text).map_err(Error::Validation)?;
    Ok(json(revision, &score_document(&doc, Some(&candidate))?))
}

#[derive(Deserialize)]
struct RecommendQuery {
    #[serde(default)]
    accept: bool,
    seed: Option<u64>,
}

async fn post_recommend(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<RecommendQuery>,
) -> Result<Response, ApiError> {
    let ws = state.workspace(&headers).await?;
    if !q.accept {
        let (session, revision) = {
            let ws = ws.lock().await;
            (ws.session.clone(), ws.revision)
        };
        let mut config = session.config.clone();
        if let Some(seed) = q.seed {
            config.seed = seed;
        }
        let proposal = recommend(&session.pool, &session.chart, &config)?;
        return Ok(json(revision, &proposal));
    }
    let expected = if_match(&headers)?;
    let mut ws = ws.lock().await;
    check_revision(&ws, expected)?;
    let mut session = ws.session.clone();
    if let Some(seed) = q.seed {
        session.config.seed = seed;
    }
    let proposal = recommend(&session.pool, &session.chart, &session.config)?;
    session.set_final(proposal.assignment.clone())?;
    session.push_proposal(proposal.clone());
    ws.session = session;
    ws.revision += 1;
    Ok(json(ws.revision, &proposal))
}

#[derive(Deserialize)]
struct OverrideRequest {
    edits: Vec<OverrideEdit>,
}

/// Applies expert edits to the latest proposal and records the result as
/// the new latest proposal and final assignment.
async fn post_override(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let expected = if_match(&headers)?;
    let req: OverrideRequest = parse_body(&body)?;
    let ws = state.workspace(&headers).await?;
    let mut ws = ws.lock().await;
    check_revision(&ws, expected)?;
    let mut session = ws.session.clone();
    let base = session.proposals.last().ok_or_else(|| {
        ApiError::bad_request("NoProposal", "there is no proposal to override; request one first")
    })?;
    let edited = apply_override(base, &req.edits, &session.pool, &session.chart, &session.config)?;
    session.set_final(edited.assignment.clone())?;
    session.push_proposal(edited.clone());
    ws.session = session;
    ws.revision += 1;
    Ok(json(ws.revision, &edited))
}

async fn post_balance(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let assignment: Assignment = parse_body(&body)?;
    let ws = state.workspace(&headers).await?;
    let ws = ws.lock().await;
    let answer = ws.session.what_if(&assignment)?;
    Ok(json(ws.revision, &answer))
}

async fn post_wilcoxon(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let revision = state.workspace(&headers).await?.lock().await.revision;
    let req: WilcoxonRequest = parse_body(&body)?;
    Ok(json(revision, &req.run()?))
}

#[derive(Deserialize)]
struct ReportQuery {
    format: Option<String>,
}

async fn get_report(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(kind): Path<String>,
    Query(q): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let ws = state.workspace(&headers).await?;
    let ws = ws.lock().await;
    let format = q.format.as_deref().unwrap_or("json");
    let (json_body, text, csv) = match kind.as_str() {
        "completion" => {
            let r = completion_report(&ws.session)?;
            (render_json(&r), r.to_text(), r.to_csv())
        }
        "acquisition" => {
            let r = acquisition_report(&ws.session);
            (render_json(&r), r.to_text(), r.to_csv())
        }
        other => {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "UnknownReport",
                format!("unknown report {other}; expected completion or acquisition"),
            ))
        }
    };
    match format {
        "json" => Ok(respond(ws.revision, "application/json", json_body)),
        "text" => Ok(respond(ws.revision, "text/plain; charset=utf-8", text)),
        "csv" => Ok(respond(ws.revision, "text/csv; charset=utf-8", csv)),
        other => Err(ApiError::bad_request("UnknownFormat", format!("unknown format {other}"))),
    }
}

#[derive(Serialize)]
struct Saved<'a> {
    revision: u64,
    path: &'a std::path::Path,
}

async fn post_save(State(state): State<AppState>, headers: HeaderMap) -> Result<Response, ApiError> {
    let path = state
        .save_path
        .as_deref()
        .ok_or_else(|| ApiError::bad_request("SaveDisabled", "the service was started without a session file"))?;
    let ws = state.workspace(&headers).await?;
    let ws = ws.lock().await;
    save_session(&ws.session, path)?;
    Ok(json(
        ws.revision,
        &Saved {
            revision: ws.revision,
            path,
        },
    ))
}
