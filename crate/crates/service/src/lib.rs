//! HTTP/JSON front end for step programs and worksheets.
//!
//! Worksheet endpoints:
//!
//! * `GET /worksheets`, `POST /worksheets`
//! * `GET /worksheets/{id}`, `GET /worksheets/{id}/events`
//! * `POST /worksheets/{id}/cells/{cid}`
//! * `POST /worksheets/{id}/run`, `POST /worksheets/{id}/symbolize`,
//!   `POST /worksheets/{id}/reset`
//!
//! Stateless program endpoints: `POST /programs/{run,solve,check,fmt}`.
//! Bodies are defined in [`stepcalc::api`]; every error is a
//! `{step, cell, code, message}` object.

#![allow(clippy::result_large_err)]

mod store;

use std::collections::BTreeMap;
use std::io;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use stepcalc::api::{
    AgreementResponse, ApiError, CheckProgram, CheckResponse, CreateWorksheet, FixtureSummary,
    FmtProgram, FmtResponse, RunProgram, SetCell, SolveProgram, SolveResponse, Symbolize,
    TraceResponse, WorksheetResponse, WorksheetSummary,
};
use stepcalc::program::{
    agreement_check, check_helpful_independence, eval_by_name, eval_by_value, parse,
    parse_decl_value, DeclValue, StepProgram,
};
use stepcalc::worksheet::{self, SessionEvent, Worksheet, WorksheetError};
use stepcalc::{fixtures, Quantity};
use tokio::net::TcpListener;

pub use store::Store;

/// Environment variable naming the worksheet storage directory.
pub const STORAGE_ENV: &str = "STEPCALC_STORAGE";

/// Upper bound on `trials` for `POST /programs/check`.
pub const MAX_TRIALS: usize = 10_000;

#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState {
            store: Arc::new(store),
        }
    }

    /// Storage from [`STORAGE_ENV`] if set, otherwise in memory.
    pub async fn from_env() -> io::Result<Self> {
        let store = match std::env::var_os(STORAGE_ENV) {
            Some(dir) if !dir.is_empty() => Store::open(dir).await?,
            _ => Store::in_memory(),
        };
        Ok(Self::new(store))
    }

    pub fn store(&self) -> &Store {
        &self.store
    }
}

/// An error response.
#[derive(Debug)]
pub struct Error {
    status: StatusCode,
    body: ApiError,
}

impl Error {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Error {
            status,
            body: ApiError {
                step: None,
                cell: None,
                code: code.to_string(),
                message: message.into(),
            },
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no worksheet `{id}`"))
    }

    fn bad_request(body: ApiError) -> Self {
        Error {
            status: StatusCode::BAD_REQUEST,
            body,
        }
    }

    fn unprocessable(body: ApiError) -> Self {
        Error {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body,
        }
    }
}

impl IntoResponse for Error {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<WorksheetError> for Error {
    fn from(e: WorksheetError) -> Self {
        let status = match e {
            WorksheetError::UnknownCell(_) => StatusCode::NOT_FOUND,
            WorksheetError::NotEditable(_) => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        Error {
            status,
            body: (&e).into(),
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", e.to_string())
    }
}

impl From<JsonRejection> for Error {
    fn from(e: JsonRejection) -> Self {
        Self::new(e.status(), "invalid_request", e.body_text())
    }
}

type Result<T> = std::result::Result<Json<T>, Error>;

/// Runs engine work off the async threads.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    tokio::task::spawn_blocking(f).await.expect("engine task panicked")
}

fn response(id: &str, w: &Worksheet, event: Option<SessionEvent>) -> WorksheetResponse {
    let document = serde_json::from_str(&worksheet::save(w)).expect("saved documents are JSON");
    WorksheetResponse {
        id: id.to_string(),
        document,
        event,
    }
}

fn parse_program(source: &str) -> std::result::Result<StepProgram, Error> {
    parse(source).map_err(|e| Error::bad_request((&e).into()))
}

async fn list_worksheets(State(s): State<AppState>) -> Result<Vec<WorksheetSummary>> {
    let list = s.store.list().await;
    Ok(Json(
        list.into_iter()
            .map(|(id, w)| WorksheetSummary {
                id,
                title: w.title,
                revision: w.revision,
            })
            .collect(),
    ))
}

async fn create_worksheet(
    State(s): State<AppState>,
    body: std::result::Result<Json<CreateWorksheet>, JsonRejection>,
) -> std::result::Result<(StatusCode, Json<WorksheetResponse>), Error> {
    let Json(req) = body?;
    let given = [req.source.is_some(), req.fixture.is_some(), req.document.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(Error::new(
            StatusCode::BAD_REQUEST,
            "invalid_request",
            "give exactly one of `source`, `fixture` or `document`",
        ));
    }
    let mut w = if let Some(doc) = &req.document {
        worksheet::load(&doc.to_string())?
    } else {
        let (source, title, problem) = match &req.fixture {
            Some(name) => {
                let f = fixtures::get(name).ok_or_else(|| {
                    Error::new(StatusCode::NOT_FOUND, "not_found", format!("no fixture `{name}`"))
                })?;
                (f.source.to_string(), f.title.to_string(), f.problem())
            }
            None => (req.source.clone().unwrap_or_default(), String::new(), String::new()),
        };
        let p = parse_program(&source)?;
        worksheet::worksheet_from_program(&p, &title, &problem)
    };
    if let Some(t) = req.title {
        w.title = t;
    }
    if let Some(p) = req.problem {
        w.problem = p;
    }
    let id = s.store.insert(w.clone()).await?;
    Ok((StatusCode::CREATED, Json(response(&id, &w, None))))
}

async fn get_worksheet(State(s): State<AppState>, Path(id): Path<String>) -> Result<WorksheetResponse> {
    let w = s.store.get(&id).await.ok_or_else(|| Error::not_found(&id))?;
    Ok(Json(response(&id, &w, None)))
}

async fn get_events(State(s): State<AppState>, Path(id): Path<String>) -> Result<Vec<SessionEvent>> {
    let entry = s.store.entry(&id).await.ok_or_else(|| Error::not_found(&id))?;
    let events = entry.lock().await.events.clone();
    Ok(Json(events))
}

/// Applies `f` under the worksheet's lock and stores the outcome.
async fn mutate(
    s: &AppState,
    id: &str,
    revision: Option<u64>,
    f: impl FnOnce(&Worksheet) -> std::result::Result<(Worksheet, SessionEvent), WorksheetError> + Send + 'static,
) -> Result<WorksheetResponse> {
    let entry = s.store.entry(id).await.ok_or_else(|| Error::not_found(id))?;
    let mut guard = entry.lock().await;
    if let Some(r) = revision {
        if r != guard.worksheet.revision {
            return Err(Error::new(
                StatusCode::CONFLICT,
                "stale_revision",
                format!("revision {r} is stale; the worksheet is at {}", guard.worksheet.revision),
            ));
        }
    }
    let current = guard.worksheet.clone();
    let (w, event) = blocking(move || f(&current)).await?;
    s.store.commit(id, &mut guard, w.clone(), event.clone()).await?;
    Ok(Json(response(id, &w, Some(event))))
}

async fn set_cell(
    State(s): State<AppState>,
    Path((id, cid)): Path<(String, String)>,
    body: std::result::Result<Json<SetCell>, JsonRejection>,
) -> Result<WorksheetResponse> {
    let Json(req) = body?;
    mutate(&s, &id, req.revision, move |w| worksheet::set_cell(w, &cid, &req.content)).await
}

async fn symbolize(
    State(s): State<AppState>,
    Path(id): Path<String>,
    body: std::result::Result<Json<Symbolize>, JsonRejection>,
) -> Result<WorksheetResponse> {
    let Json(req) = body?;
    mutate(&s, &id, req.revision, move |w| {
        worksheet::symbolize_cell(w, &req.cell, req.letter.as_deref())
    })
    .await
}

async fn run_worksheet(State(s): State<AppState>, Path(id): Path<String>) -> Result<WorksheetResponse> {
    mutate(&s, &id, None, worksheet::run).await
}

async fn reset_worksheet(State(s): State<AppState>, Path(id): Path<String>) -> Result<WorksheetResponse> {
    mutate(&s, &id, None, |w| Ok(worksheet::reset(w))).await
}

fn overrides(p: &StepProgram, given: &BTreeMap<String, String>) -> std::result::Result<BTreeMap<String, Quantity>, Error> {
    let mut out = BTreeMap::new();
    for (name, text) in given {
        let bad = |code: &str, message: String| {
            Error::bad_request(ApiError {
                step: None,
                cell: Some(name.clone()),
                code: code.to_string(),
                message,
            })
        };
        match parse_decl_value(text, p.registry()) {
            Ok(DeclValue::Quantity(q)) => {
                out.insert(name.clone(), q);
            }
            Ok(symbol) => return Err(bad("not_concrete", format!("`{name}`: `{symbol}` is not a number"))),
            Err(e) => return Err(bad(e.code(), format!("`{name}`: {e}"))),
        }
    }
    Ok(out)
}

async fn run_program(body: std::result::Result<Json<RunProgram>, JsonRejection>) -> Result<TraceResponse> {
    let Json(req) = body?;
    blocking(move || {
        let p = parse_program(&req.source)?;
        let over = overrides(&p, &req.overrides)?;
        let t = eval_by_value(&p, &over).map_err(|e| Error::unprocessable((&e).into()))?;
        Ok(Json(TraceResponse::from(&t)))
    })
    .await
}

async fn solve_program(body: std::result::Result<Json<SolveProgram>, JsonRejection>) -> Result<SolveResponse> {
    let Json(req) = body?;
    blocking(move || {
        let p = parse_program(&req.source)?;
        let r = eval_by_name(&p, &req.symbolize).map_err(|e| Error::unprocessable((&e).into()))?;
        Ok(Json(SolveResponse::from(&r)))
    })
    .await
}

async fn check_program(body: std::result::Result<Json<CheckProgram>, JsonRejection>) -> Result<CheckResponse> {
    let Json(req) = body?;
    if req.trials > MAX_TRIALS {
        return Err(Error::new(
            StatusCode::BAD_REQUEST,
            "invalid_request",
            format!("at most {MAX_TRIALS} trials"),
        ));
    }
    blocking(move || {
        let p = parse_program(&req.source)?;
        let (independence, independence_error) = match check_helpful_independence(&p) {
            Ok(entries) => (Some(entries.iter().map(Into::into).collect()), None),
            Err(e) => (None, Some((&e).into())),
        };
        let agreement = AgreementResponse::from(&agreement_check(&p, req.trials, req.seed));
        Ok(Json(CheckResponse {
            independence,
            independence_error,
            agreement,
        }))
    })
    .await
}

async fn fmt_program(body: std::result::Result<Json<FmtProgram>, JsonRejection>) -> Result<FmtResponse> {
    let Json(req) = body?;
    let p = parse_program(&req.source)?;
    Ok(Json(FmtResponse { source: p.fmt() }))
}

async fn list_fixtures() -> Json<Vec<FixtureSummary>> {
    Json(
        fixtures::ALL
            .iter()
            .map(|f| FixtureSummary {
                name: f.name.to_string(),
                title: f.title.to_string(),
                source: f.source.to_string(),
            })
            .collect(),
    )
}

async fn health() -> &'static str {
    "ok"
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/fixtures", get(list_fixtures))
        .route("/worksheets", get(list_worksheets).post(create_worksheet))
        .route("/worksheets/{id}", get(get_worksheet))
        .route("/worksheets/{id}/events", get(get_events))
        .route("/worksheets/{id}/cells/{cid}", post(set_cell))
        .route("/worksheets/{id}/run", post(run_worksheet))
        .route("/worksheets/{id}/symbolize", post(symbolize))
        .route("/worksheets/{id}/reset", post(reset_worksheet))
        .route("/programs/run", post(run_program))
        .route("/programs/solve", post(solve_program))
        .route("/programs/check", post(check_program))
        .route("/programs/fmt", post(fmt_program))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, state: AppState) -> io::Result<()> {
    axum::serve(listener, router(state)).await
}

/// Starts a server on `127.0.0.1` at an ephemeral port in a background
/// thread with its own runtime and returns the bound address. The server
/// lives as long as the process.
pub fn spawn_background(state: AppState) -> io::Result<std::net::SocketAddr> {
    let std_listener = std::net::TcpListener::bind(("127.0.0.1", 0))?;
    std_listener.set_nonblocking(true)?;
    let addr = std_listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()?;
    std::thread::Builder::new()
        .name("stepcalc-server".into())
        .spawn(move || {
            runtime.block_on(async move {
                let listener = TcpListener::from_std(std_listener)?;
                serve(listener, state).await
            })
        })?;
    Ok(addr)
}
