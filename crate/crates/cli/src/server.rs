//! HTTP API over a single session.
//!
//! Every handler takes the session lock for its whole duration, so mutations
//! are serialized and reads never see a half-applied step.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::State as AxumState;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use rpn_core::interface::json::{encode_state, EnabledJson, NetJson};
use rpn_core::interface::session::{Session, SessionError};
use rpn_core::model::{Direction, Mode};

type Shared = Arc<Mutex<Session>>;

#[derive(Deserialize)]
pub struct FireRequest {
    pub transition: String,
}

#[derive(Deserialize)]
pub struct ReverseRequest {
    pub transition: String,
    pub mode: String,
}

pub fn router(session: Session) -> Router {
    Router::new()
        .route("/net", get(net))
        .route("/state", get(state))
        .route("/enabled", get(enabled))
        .route("/trace", get(trace))
        .route("/fire", post(fire))
        .route("/reverse", post(reverse))
        .route("/undo", post(undo))
        .route("/reset", post(reset))
        .with_state(Arc::new(Mutex::new(session)))
}

/// Serves `session` on `127.0.0.1:port` until the process is stopped.
pub async fn serve(session: Session, port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("serving {} on http://{}", session.net().name(), listener.local_addr()?);
    axum::serve(listener, router(session)).await
}

fn lock(shared: &Shared) -> MutexGuard<'_, Session> {
    // A panic inside a handler cannot leave the session half-updated, since
    // every mutation replaces whole values.
    shared.lock().unwrap_or_else(|e| e.into_inner())
}

/// The state body, byte-identical to `rpn run` output.
fn state_body(session: &Session) -> Response {
    (
        [(header::CONTENT_TYPE, "application/json")],
        encode_state(session.net(), session.state()),
    )
        .into_response()
}

fn error(status: StatusCode, body: serde_json::Value) -> Response {
    (status, Json(body)).into_response()
}

fn session_error(e: SessionError) -> Response {
    match e {
        SessionError::NotEnabled { index, action, enabled } => {
            let mode = match action.direction {
                Direction::Forward => "forward".to_string(),
                Direction::Reverse(m) => m.to_string(),
            };
            error(
                StatusCode::CONFLICT,
                json!({
                    "error": "NOT-ENABLED",
                    "index": index,
                    "action": action.to_string(),
                    "transition": action.transition.to_string(),
                    "mode": mode,
                    "enabled": EnabledJson::from(&*enabled),
                }),
            )
        }
        SessionError::UnknownTransition(t) => error(
            StatusCode::NOT_FOUND,
            json!({ "error": "UNKNOWN-TRANSITION", "transition": t }),
        ),
        SessionError::NothingToUndo => error(StatusCode::CONFLICT, json!({ "error": "NOTHING-TO-UNDO" })),
        SessionError::Parse(e) => error(
            StatusCode::BAD_REQUEST,
            json!({ "error": "BAD-REQUEST", "message": e.to_string() }),
        ),
        SessionError::Semantics(e) => error(
            StatusCode::INTERNAL_SERVER_ERROR,
            json!({ "error": "SEMANTICS", "message": e.to_string() }),
        ),
    }
}

async fn net(AxumState(shared): AxumState<Shared>) -> Response {
    let session = lock(&shared);
    Json(NetJson::new(session.net(), session.initial_marking())).into_response()
}

async fn state(AxumState(shared): AxumState<Shared>) -> Response {
    state_body(&lock(&shared))
}

async fn enabled(AxumState(shared): AxumState<Shared>) -> Response {
    Json(EnabledJson::from(&lock(&shared).enabled())).into_response()
}

async fn trace(AxumState(shared): AxumState<Shared>) -> Response {
    let log = lock(&shared).log();
    let actions: Vec<String> = log.actions().iter().map(|a| a.to_string()).collect();
    Json(json!({ "trace": log.to_string(), "actions": actions })).into_response()
}

async fn fire(AxumState(shared): AxumState<Shared>, Json(req): Json<FireRequest>) -> Response {
    let mut session = lock(&shared);
    match session.fire(&req.transition) {
        Ok(_) => state_body(&session),
        Err(e) => session_error(e),
    }
}

async fn reverse(AxumState(shared): AxumState<Shared>, Json(req): Json<ReverseRequest>) -> Response {
    let mode: Mode = match req.mode.parse() {
        Ok(m) => m,
        Err(e) => return session_error(SessionError::Parse(e)),
    };
    let mut session = lock(&shared);
    match session.reverse(&req.transition, mode) {
        Ok(_) => state_body(&session),
        Err(e) => session_error(e),
    }
}

async fn undo(AxumState(shared): AxumState<Shared>) -> Response {
    let mut session = lock(&shared);
    match session.undo() {
        Ok(_) => state_body(&session),
        Err(e) => session_error(e),
    }
}

async fn reset(AxumState(shared): AxumState<Shared>) -> Response {
    let mut session = lock(&shared);
    session.reset();
    state_body(&session)
}
