//! HTTP API driven in-process.

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use rpn_cli::server::router;
use rpn_core::interface::session::Session;
use rpn_core::{nets, parse_net};

fn app(src: &str) -> Router {
    let (net, m0) = parse_net(src).unwrap();
    router(Session::new(net, m0))
}

async fn call(app: &Router, method: &str, path: &str, body: Option<Value>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(path);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn json_of(app: &Router, method: &str, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = call(app, method, path, body).await;
    (status, serde_json::from_str(&text).unwrap())
}

#[tokio::test]
async fn enabled_sets_after_two_steps_on_catalysis() {
    let app = app(nets::CATALYSIS);
    for t in ["t1", "t2"] {
        let (status, _) = call(&app, "POST", "/fire", Some(json!({ "transition": t }))).await;
        assert_eq!(status, StatusCode::OK);
    }
    let (status, enabled) = json_of(&app, "GET", "/enabled", None).await;
    assert_eq!(status, StatusCode::OK);
    // Oracle: after t1;t2 nothing fires forward, t2 holds the maximal key and
    // none of its effects were used afterwards, and both are executed.
    assert_eq!(
        enabled,
        json!({ "forward": [], "bt": ["t2"], "co": ["t2"], "o": ["t1", "t2"] })
    );
}

#[tokio::test]
async fn fire_returns_the_new_state() {
    let app = app(nets::CATALYSIS);
    let (status, state) = json_of(&app, "POST", "/fire", Some(json!({ "transition": "t1" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        state["marking"]["x"],
        json!({ "bases": ["a", "c"], "bonds": [["a", "c"]] })
    );
    assert_eq!(state["history"], json!({ "t1": 1, "t2": null }));
    let (_, again) = json_of(&app, "GET", "/state", None).await;
    assert_eq!(again, state);
}

#[tokio::test]
async fn backtracking_a_non_maximal_transition_conflicts() {
    let app = app(nets::CATALYSIS);
    for t in ["t1", "t2"] {
        call(&app, "POST", "/fire", Some(json!({ "transition": t }))).await;
    }
    let (status, body) = json_of(
        &app,
        "POST",
        "/reverse",
        Some(json!({ "transition": "t1", "mode": "bt" })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], "NOT-ENABLED");
    assert_eq!(body["action"], "~t1:bt");
    assert_eq!(body["mode"], "bt");
    assert_eq!(body["enabled"]["bt"], json!(["t2"]));
    // The failed request left the session alone.
    let (_, trace) = json_of(&app, "GET", "/trace", None).await;
    assert_eq!(trace["trace"], "t1,t2");
}

#[tokio::test]
async fn out_of_order_reversal_releases_the_catalyst() {
    let app = app(nets::CATALYSIS);
    for t in ["t1", "t2"] {
        call(&app, "POST", "/fire", Some(json!({ "transition": t }))).await;
    }
    let (status, state) = json_of(
        &app,
        "POST",
        "/reverse",
        Some(json!({ "transition": "t1", "mode": "o" })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["marking"]["u"]["bases"], json!(["c"]));
    assert_eq!(
        state["marking"]["y"],
        json!({ "bases": ["a", "b"], "bonds": [["a", "b"]] })
    );
    let (_, trace) = json_of(&app, "GET", "/trace", None).await;
    assert_eq!(
        trace,
        json!({ "trace": "t1,t2,~t1:o", "actions": ["t1", "t2", "~t1:o"] })
    );
}

#[tokio::test]
async fn undo_and_reset() {
    let app = app(nets::CATALYSIS);
    let (_, initial) = call(&app, "GET", "/state", None).await;
    let (_, after_t1) = call(&app, "POST", "/fire", Some(json!({ "transition": "t1" }))).await;
    call(&app, "POST", "/fire", Some(json!({ "transition": "t2" }))).await;
    let (status, undone) = call(&app, "POST", "/undo", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, after_t1);
    let (_, reset) = call(&app, "POST", "/reset", None).await;
    assert_eq!(reset, initial);
    let (status, body) = json_of(&app, "POST", "/undo", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], "NOTHING-TO-UNDO");
}

#[tokio::test]
async fn bad_requests() {
    let app = app(nets::CATALYSIS);
    let (status, body) = json_of(&app, "POST", "/fire", Some(json!({ "transition": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"], "UNKNOWN-TRANSITION");
    let (status, body) = json_of(
        &app,
        "POST",
        "/reverse",
        Some(json!({ "transition": "t1", "mode": "sideways" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "BAD-REQUEST");
    let (status, _) = call(&app, "POST", "/fire", Some(json!({}))).await;
    assert!(status.is_client_error());
}

#[tokio::test]
async fn net_description() {
    let app = app(nets::CATALYSIS);
    let (status, net) = json_of(&app, "GET", "/net", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(net["transitions"], json!(["t1", "t2"]));
    assert_eq!(net["places"], json!(["u", "v", "w", "x", "y"]));
    let (reparsed, _) = parse_net(net["text"].as_str().unwrap()).unwrap();
    assert_eq!(reparsed, parse_net(nets::CATALYSIS).unwrap().0);
}

#[tokio::test]
async fn concurrent_mutations_are_serialized() {
    let app = app(nets::CAUSAL);
    let fire = |t: &'static str| {
        let app = app.clone();
        tokio::spawn(async move { call(&app, "POST", "/fire", Some(json!({ "transition": t }))).await.0 })
    };
    let results = [fire("t1").await.unwrap(), fire("t2").await.unwrap()];
    assert!(results.iter().all(|s| *s == StatusCode::OK));
    let handles: Vec<_> = (0..8).map(|_| fire("t3")).collect();
    let mut ok = 0;
    for h in handles {
        if h.await.unwrap() == StatusCode::OK {
            ok += 1;
        }
    }
    // t3 can only fire once.
    assert_eq!(ok, 1);
    let (_, trace) = json_of(&app, "GET", "/trace", None).await;
    assert_eq!(trace["actions"].as_array().unwrap().len(), 3);
}
