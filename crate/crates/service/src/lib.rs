//! HTTP/JSON API (`/v1`) over elicitation sessions and matrix analysis.
//!
//! All bodies are JSON and pairs are 1-based. Errors carry the status
//! 400 (malformed body or query), 404 (unknown session), 409 (wrong pair,
//! closed session, conflicting replay), 415 (missing JSON content type) or
//! 422 (domain error), with the error case name in the body.

mod error;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{FromRequest, Path, Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use pcm_core::analysis::{analyze, Analysis, AnalysisOptions};
use pcm_core::elicitation::{
    CrRecord, PolicyDocument, SessionDocument, SessionOptions, SessionReport, SessionStatus,
};
use pcm_core::format::ValueToken;
use pcm_core::inconsistency::{simulate_ri, MissingPatternPolicy};
use pcm_core::weighting::{Bounds, CompletionDocument, CompletionMethod};
use pcm_core::{
    parse_pcm, ri_approx, ri_lookup, IncompletePcm, MatrixDocument, PcmError, QuestionPolicy,
    RiQueryPolicy, Scale, Session, WeightMethod,
};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

pub use error::ApiError;
pub use store::{SessionStore, StoreError};

/// Largest Monte Carlo run the `/v1/ri` endpoint accepts.
pub const MAX_SIMULATION_SAMPLES: usize = 1_000_000;

type ApiResult<T> = Result<T, ApiError>;

/// JSON extractor whose rejections use the API error body.
#[derive(FromRequest)]
#[from_request(via(Json), rejection(ApiError))]
struct Body<T>(T);

#[derive(Clone)]
struct AppState {
    store: Arc<SessionStore>,
}

pub fn router(store: Arc<SessionStore>, cors_origins: &[String]) -> Result<Router, String> {
    let mut app = Router::new()
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(export_session))
        .route("/v1/sessions/{id}/next", get(next_pair))
        .route("/v1/sessions/{id}/answers", post(submit_answer))
        .route("/v1/sessions/{id}/report", get(report))
        .route("/v1/sessions/{id}/abandon", post(abandon))
        .route("/v1/analyze", post(analyze_matrix))
        .route("/v1/complete", post(complete_matrix))
        .route("/v1/ri", get(random_index))
        .with_state(AppState { store });
    if !cors_origins.is_empty() {
        let origins = cors_origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| format!("invalid CORS origin {o:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origins)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([axum::http::header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: String,
    pub port: u16,
    pub data_dir: PathBuf,
    pub cors_origins: Vec<String>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            addr: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("pcm-data"),
            cors_origins: Vec::new(),
        }
    }
}

/// Binds and serves until Ctrl-C.
pub async fn serve(config: ServeConfig) -> std::io::Result<()> {
    let store = Arc::new(SessionStore::open(&config.data_dir)?);
    let app = router(store, &config.cors_origins).map_err(std::io::Error::other)?;
    let addr: SocketAddr = format!("{}:{}", config.addr, config.port)
        .parse()
        .map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("bad address: {e}"),
            )
        })?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

// -- sessions

#[derive(Deserialize)]
#[serde(untagged)]
enum PolicyInput {
    Name(String),
    Document(PolicyDocument),
}

impl PolicyInput {
    fn to_policy(&self) -> Result<QuestionPolicy, PcmError> {
        match self {
            PolicyInput::Name(s) => s.parse(),
            PolicyInput::Document(d) => d.to_policy(),
        }
    }
}

#[derive(Deserialize)]
struct CreateSessionRequest {
    n: usize,
    #[serde(default)]
    labels: Vec<String>,
    policy: Option<PolicyInput>,
    scale: Option<Scale>,
    bounded: Option<bool>,
}

#[derive(Serialize)]
struct CreatedSession {
    id: String,
    n: usize,
    labels: Vec<String>,
    order: Vec<[usize; 2]>,
    total: usize,
    status: SessionStatus,
}

async fn create_session(
    State(st): State<AppState>,
    Body(req): Body<CreateSessionRequest>,
) -> ApiResult<(StatusCode, Json<CreatedSession>)> {
    let defaults = SessionOptions::default();
    let opts = SessionOptions {
        labels: req.labels,
        policy: match &req.policy {
            Some(p) => p.to_policy()?,
            None => defaults.policy,
        },
        scale: req.scale.unwrap_or(defaults.scale),
        bounded: req.bounded.unwrap_or(defaults.bounded),
    };
    let session = Session::create(req.n, opts)?;
    let body = CreatedSession {
        id: session.id().to_owned(),
        n: session.n(),
        labels: session.labels().to_vec(),
        order: session
            .order()
            .iter()
            .map(|&(i, j)| [i + 1, j + 1])
            .collect(),
        total: session.total_questions(),
        status: session.status(),
    };
    st.store.insert(session).await?;
    Ok((StatusCode::CREATED, Json(body)))
}

async fn export_session(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionDocument>> {
    let g = st.store.lock(&id).await?;
    Ok(Json(g.session().to_document()))
}

#[derive(Serialize)]
#[serde(untagged)]
enum NextResponse {
    Pair {
        pair: [usize; 2],
        labels: [String; 2],
        answered: usize,
        total: usize,
    },
    Done {
        done: bool,
        status: SessionStatus,
    },
}

async fn next_pair(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<NextResponse>> {
    let g = st.store.lock(&id).await?;
    let s = g.session();
    Ok(Json(match s.next_pair() {
        Some((i, j)) if s.status() == SessionStatus::Active => NextResponse::Pair {
            pair: [i + 1, j + 1],
            labels: [s.labels()[i].clone(), s.labels()[j].clone()],
            answered: s.answers().len(),
            total: s.total_questions(),
        },
        _ => NextResponse::Done {
            done: true,
            status: s.status(),
        },
    }))
}

#[derive(Deserialize)]
struct AnswerRequest {
    i: usize,
    j: usize,
    value: ValueToken,
}

#[derive(Serialize)]
#[serde(untagged)]
enum AnswerOutcome {
    Record(CrRecord),
    Pending {
        answered_count: usize,
        pair: [usize; 2],
        connected: bool,
    },
}

#[derive(Serialize)]
struct AnswerResponse {
    #[serde(flatten)]
    outcome: AnswerOutcome,
    status: SessionStatus,
    next_pair: Option<[usize; 2]>,
}

fn answer_response(s: &Session, index: usize) -> AnswerResponse {
    let a = &s.answers()[index];
    let outcome = match s
        .cr_history()
        .iter()
        .find(|r| r.answered_count == index + 1)
    {
        Some(r) => AnswerOutcome::Record(r.clone()),
        None => AnswerOutcome::Pending {
            answered_count: index + 1,
            pair: [a.i + 1, a.j + 1],
            connected: false,
        },
    };
    AnswerResponse {
        outcome,
        status: s.status(),
        next_pair: s
            .next_pair()
            .filter(|_| s.status() == SessionStatus::Active)
            .map(|(i, j)| [i + 1, j + 1]),
    }
}

fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

async fn submit_answer(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<AnswerRequest>,
) -> ApiResult<Json<AnswerResponse>> {
    let value = req
        .value
        .to_judgment()
        .map_err(|e| PcmError::BadValue(e.to_string()))?;
    let mut g = st.store.lock(&id).await?;
    let s = g.session();
    let n = s.n();
    if req.i == 0 || req.j == 0 || req.i > n || req.j > n || req.i == req.j {
        return Err(PcmError::BadValue(format!(
            "pair ({}, {}) is not a valid pair for n = {n}",
            req.i, req.j
        ))
        .into());
    }
    let (i, j) = (req.i - 1, req.j - 1);
    // a replay of a recorded answer is acknowledged if the value agrees
    if let Some(k) = s
        .answers()
        .iter()
        .position(|a| (a.i, a.j) == (i, j) || (a.i, a.j) == (j, i))
    {
        let a = &s.answers()[k];
        let recorded = if (a.i, a.j) == (i, j) {
            a.value.value()
        } else {
            1.0 / a.value.value()
        };
        if !same_value(recorded, value.value()) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "ConflictingAnswer",
                format!(
                    "a_{}{} was already answered with {}",
                    req.i,
                    req.j,
                    a.value.to_token()
                ),
            ));
        }
        return Ok(Json(answer_response(s, k)));
    }
    if s.status() != SessionStatus::Active {
        return Err(PcmError::SessionClosed.into());
    }
    let mut next = s.clone();
    next.submit((i, j), value)?;
    g.commit_answer(next)?;
    let s = g.session();
    Ok(Json(answer_response(s, s.answers().len() - 1)))
}

async fn report(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionReport>> {
    let g = st.store.lock(&id).await?;
    Ok(Json(g.session().report()))
}

#[derive(Serialize)]
struct StatusResponse {
    id: String,
    status: SessionStatus,
}

async fn abandon(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<StatusResponse>> {
    let mut g = st.store.lock(&id).await?;
    let mut next = g.session().clone();
    next.abandon()?;
    g.commit_snapshot(next)?;
    Ok(Json(StatusResponse {
        id,
        status: g.session().status(),
    }))
}

// -- analysis

/// A CSV grid as a string, or a structured matrix document.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Text(String),
    Document(MatrixDocument),
}

impl MatrixInput {
    fn to_pcm(&self) -> Result<IncompletePcm, PcmError> {
        match self {
            MatrixInput::Text(t) => parse_pcm(t),
            MatrixInput::Document(d) => d.to_pcm(),
        }
    }
}

fn ri_policy(name: Option<&str>) -> ApiResult<RiQueryPolicy> {
    match name {
        None | Some("approx") | Some("table-then-approx") => Ok(RiQueryPolicy::TableThenApprox),
        Some("table") => Ok(RiQueryPolicy::TableOnly),
        Some(other) => Err(ApiError::bad_request(format!(
            "unknown random-index policy {other:?}"
        ))),
    }
}

#[derive(Deserialize)]
struct AnalyzeRequest {
    matrix: MatrixInput,
    method: Option<WeightMethod>,
    bounded: Option<bool>,
    ri_policy: Option<String>,
}

async fn analyze_matrix(Body(req): Body<AnalyzeRequest>) -> ApiResult<Json<Analysis>> {
    let pcm = req.matrix.to_pcm()?;
    let defaults = AnalysisOptions::default();
    let opts = AnalysisOptions {
        method: req.method.unwrap_or(defaults.method),
        bounded: req.bounded.unwrap_or(defaults.bounded),
        ri_policy: ri_policy(req.ri_policy.as_deref())?,
    };
    blocking(move || Ok(Json(analyze(&pcm, &opts)?))).await
}

#[derive(Deserialize)]
struct CompleteRequest {
    matrix: MatrixInput,
    method: String,
    bounds: Option<String>,
}

async fn complete_matrix(Body(req): Body<CompleteRequest>) -> ApiResult<Json<CompletionDocument>> {
    let pcm = req.matrix.to_pcm()?;
    let method: CompletionMethod = req.method.parse().map_err(ApiError::bad_request)?;
    let bounds = req.bounds.as_deref().map(Bounds::parse).transpose()?;
    blocking(move || Ok(Json(method.complete(&pcm, bounds)?.to_document()))).await
}

#[derive(Deserialize)]
struct RiQuery {
    n: usize,
    m: usize,
    policy: Option<String>,
    samples: Option<usize>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct RiResponse {
    n: usize,
    m: usize,
    value: f64,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    stdev: Option<f64>,
}

async fn random_index(
    query: Result<Query<RiQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<RiResponse>> {
    let Query(q) = query?;
    let (n, m) = (q.n, q.m);
    blocking(move || {
        let (value, source, stdev) = match q.policy.as_deref().unwrap_or("table-then-approx") {
            "approx" => (ri_approx(n, m)?, "approx".to_owned(), None),
            "simulate" => {
                let samples = q.samples.unwrap_or(10_000);
                if samples > MAX_SIMULATION_SAMPLES {
                    return Err(PcmError::InvalidSamples(format!(
                        "at most {MAX_SIMULATION_SAMPLES} samples"
                    ))
                    .into());
                }
                let (mean, sd) = simulate_ri(
                    n,
                    m,
                    samples,
                    q.seed.unwrap_or(0),
                    &MissingPatternPolicy::UniformConnected,
                )?;
                (mean, "simulated".to_owned(), Some(sd))
            }
            other => {
                let policy = ri_policy(Some(other))?;
                let (v, s) = ri_lookup(n, m, policy)?;
                (v, s.to_string(), None)
            }
        };
        Ok(Json(RiResponse {
            n,
            m,
            value,
            source,
            stdev,
        }))
    })
    .await
}
