//! JSON HTTP front end.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Json, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use locusforge_core::cancel::Deadline;
use serde_json::json;
use tokio::sync::Semaphore;
use tower_http::cors::CorsLayer;

use crate::jobs::{request_hash, Job, JobError, JobKind, JobRequest, DEFAULT_DEADLINE_MS};

pub const HASH_HEADER: &str = "x-request-hash";
pub const ELAPSED_HEADER: &str = "x-elapsed-ms";

/// Extra time allowed for a job to notice its deadline before the response
/// is forced.
const CANCEL_GRACE: Duration = Duration::from_millis(50);

#[derive(Clone)]
pub struct AppState {
    workers: Arc<Semaphore>,
}

impl AppState {
    pub fn new(workers: usize) -> Self {
        Self { workers: Arc::new(Semaphore::new(workers.max(1))) }
    }

    pub fn with_host_parallelism() -> Self {
        Self::new(std::thread::available_parallelism().map(usize::from).unwrap_or(1))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/locus", post(|s, b| job(JobKind::Locus, s, b)))
        .route("/trace", post(|s, b| job(JobKind::Trace, s, b)))
        .route("/fit", post(|s, b| job(JobKind::Fit, s, b)))
        .route("/prove", post(|s, b| job(JobKind::Prove, s, b)))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

async fn health() -> Response {
    json_response(StatusCode::OK, json!({"status": "ok"}).to_string())
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], body).into_response()
}

pub fn status_of(err: &JobError) -> StatusCode {
    if err.is_cancelled() {
        StatusCode::REQUEST_TIMEOUT
    } else if err.is_internal() {
        StatusCode::INTERNAL_SERVER_ERROR
    } else {
        StatusCode::BAD_REQUEST
    }
}

pub fn error_body(err: &JobError) -> String {
    json!({"error": {"code": err.code(), "message": err.to_string()}}).to_string()
}

fn error_response(err: &JobError) -> Response {
    json_response(status_of(err), error_body(err))
}

async fn job(kind: JobKind, State(state): State<AppState>, body: Result<Json<JobRequest>, JsonRejection>) -> Response {
    let received = Instant::now();
    let req = match body {
        Ok(Json(req)) => req,
        Err(rej) => return error_response(&JobError::BadRequest(rej.body_text())),
    };
    if let Some(k) = req.kind {
        if k != kind {
            return error_response(&JobError::BadRequest(format!(
                "kind `{}` posted to /{}",
                k.as_str(),
                kind.as_str()
            )));
        }
    }
    let hash = request_hash(kind, &req.payload);
    let budget = Duration::from_millis(req.deadline_ms.unwrap_or(DEFAULT_DEADLINE_MS));
    let job = match Job::parse(kind, req.payload) {
        Ok(j) => j,
        Err(e) => return with_hash(error_response(&e), &hash),
    };

    let result = run_bounded(&state, job, received + budget).await;
    let mut resp = match result {
        Ok(body) => json_response(StatusCode::OK, body),
        Err(e) => error_response(&e),
    };
    if let Ok(v) = HeaderValue::from_str(&received.elapsed().as_millis().to_string()) {
        resp.headers_mut().insert(ELAPSED_HEADER, v);
    }
    with_hash(resp, &hash)
}

fn with_hash(mut resp: Response, hash: &str) -> Response {
    if let Ok(v) = HeaderValue::from_str(hash) {
        resp.headers_mut().insert(HASH_HEADER, v);
    }
    resp
}

/// Waits FIFO for a worker, then runs the job on the blocking pool.
async fn run_bounded(state: &AppState, job: Job, deadline_at: Instant) -> Result<String, JobError> {
    let cancelled = Arc::new(AtomicBool::new(false));
    let deadline = Deadline::at(deadline_at).with_flag(cancelled.clone());
    let limit = tokio::time::Instant::from_std(deadline_at + CANCEL_GRACE);

    let work = async {
        let permit = state.workers.clone().acquire_owned().await.map_err(|e| JobError::Internal(e.to_string()))?;
        let d = deadline.clone();
        let handle = tokio::task::spawn_blocking(move || {
            let _permit = permit;
            job.run(&d).map(|out| out.to_json())
        });
        match handle.await {
            Ok(r) => r,
            Err(e) => Err(JobError::Internal(e.to_string())),
        }
    };
    match tokio::time::timeout_at(limit, work).await {
        Ok(r) => r,
        Err(_) => {
            cancelled.store(true, Ordering::Relaxed);
            Err(JobError::Core(locusforge_core::Error::Cancelled))
        }
    }
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::with_host_parallelism()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
