use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pcm_core::parse_pcm;
use pcm_service::{router, SessionStore};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn app(dir: &Path) -> Router {
    router(Arc::new(SessionStore::open(dir).unwrap()), &[]).unwrap()
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let body = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, body)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await
}

async fn create(app: &Router, body: Value) -> String {
    let (status, created) = post(app, "/v1/sessions", body).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    created["id"].as_str().unwrap().to_owned()
}

/// Answers the next `count` questions from `matrix` and returns the responses.
async fn answer_from(app: &Router, id: &str, matrix: &str, count: usize) -> Vec<Value> {
    let pcm = parse_pcm(matrix).unwrap();
    let mut out = Vec::new();
    for _ in 0..count {
        let (_, next) = get(app, &format!("/v1/sessions/{id}/next")).await;
        let [i, j] = [
            next["pair"][0].as_u64().unwrap() as usize,
            next["pair"][1].as_u64().unwrap() as usize,
        ];
        let value = pcm.judgment(i - 1, j - 1).unwrap().to_token();
        let (status, body) = post(
            app,
            &format!("/v1/sessions/{id}/answers"),
            json!({"i": i, "j": j, "value": value}),
        )
        .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        out.push(body);
    }
    out
}

#[tokio::test]
async fn example7_replay_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let pairs: Vec<Value> = fixture("example7_figure_order.txt")
        .trim()
        .split(',')
        .map(|p| {
            let (i, j) = p.split_once('-').unwrap();
            json!([i.parse::<u64>().unwrap(), j.parse::<u64>().unwrap()])
        })
        .collect();
    let id = create(
        &app,
        json!({"n": 6, "policy": {"kind": "fixed-order", "pairs": pairs}}),
    )
    .await;
    let answers = answer_from(&app, &id, &fixture("example7.csv"), 15).await;
    assert_eq!(answers[0]["connected"], json!(false));
    assert!(answers[5]["cr_generalized"].as_f64().unwrap() < 0.1);
    assert!(answers[6]["cr_generalized"].as_f64().unwrap() > 0.1);
    assert_eq!(answers[14]["status"], json!("completed"));
    assert_eq!(answers[14]["next_pair"], Value::Null);

    let (status, report) = get(&app, &format!("/v1/sessions/{id}/report")).await;
    assert_eq!(status, StatusCode::OK);
    let last = report["generalized"].as_array().unwrap().last().unwrap()["cr"]
        .as_f64()
        .unwrap();
    assert!((last - 0.093606).abs() < 1e-3, "{last}");
    let up = &report["crossings"][0];
    assert_eq!(
        (up["direction"].as_str(), up["answered_count"].as_u64()),
        (Some("up"), Some(7))
    );
    assert_eq!(report["acceptable"], json!(true));

    let (_, next) = get(&app, &format!("/v1/sessions/{id}/next")).await;
    assert_eq!(next, json!({"done": true, "status": "completed"}));
}

#[tokio::test]
async fn complete_and_ri_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, doc) = post(
        &app,
        "/v1/complete",
        json!({"matrix": fixture("example2.csv"), "method": "em"}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{doc}");
    let c15 = doc["filled"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["i"] == 1 && f["j"] == 5)
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((c15 - 0.1798).abs() < 5e-4, "{c15}");

    let (status, ri) = get(&app, "/v1/ri?n=5&m=2&policy=table").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        (ri["value"].as_f64(), ri["source"].as_str()),
        (Some(0.739), Some("table"))
    );

    let (status, ri) = get(&app, "/v1/ri?n=7&m=2").await;
    assert_eq!(
        (status, ri["source"].as_str()),
        (StatusCode::OK, Some("approx"))
    );

    let (status, sim) = get(&app, "/v1/ri?n=4&m=1&policy=simulate&samples=200&seed=3").await;
    assert_eq!(status, StatusCode::OK);
    assert!(sim["stdev"].as_f64().is_some());
    let (_, again) = get(&app, "/v1/ri?n=4&m=1&policy=simulate&samples=200&seed=3").await;
    assert_eq!(sim, again);
}

#[tokio::test]
async fn analyze_reports_ratio_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, a) = post(
        &app,
        "/v1/analyze",
        json!({"matrix": fixture("example6_bwm.csv")}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{a}");
    assert_eq!(a["graph"]["connected"], json!(true));
    let v = &a["violations"]["violations"][0];
    assert_eq!((v["i"].as_u64(), v["j"].as_u64()), (Some(0), Some(1)));
    assert!(a["inconsistency"]["cr"].as_f64().is_some());

    let doc = serde_json::to_value(pcm_core::MatrixDocument::from_pcm(
        &parse_pcm(&fixture("example7.csv")).unwrap(),
    ))
    .unwrap();
    let (status, a) = post(&app, "/v1/analyze", json!({"matrix": doc, "method": "em"})).await;
    assert_eq!(status, StatusCode::OK, "{a}");
    assert_eq!(a["method"], json!("em"));
}

#[tokio::test]
async fn error_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());

    let req = Request::post("/v1/sessions")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from("{not json"))
        .unwrap();
    let (status, body) = send(&app, req).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::BAD_REQUEST, Some("MalformedRequest"))
    );

    let (status, _) = post(&app, "/v1/sessions", json!({"labels": []})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let req = Request::post("/v1/sessions")
        .body(Body::from(r#"{"n": 4}"#))
        .unwrap();
    let (status, _) = send(&app, req).await;
    assert_eq!(status, StatusCode::UNSUPPORTED_MEDIA_TYPE);

    let (status, _) = get(&app, "/v1/sessions/0123456789abcdef0123456789abcdef/report").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = get(&app, "/v1/sessions/..%2f..%2fetc/report").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, body) = post(&app, "/v1/sessions", json!({"n": 5, "policy": "ross"})).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (
            StatusCode::UNPROCESSABLE_ENTITY,
            Some("PolicyArityMismatch")
        )
    );

    let id = create(&app, json!({"n": 4, "scale": "saaty"})).await;
    let (_, next) = get(&app, &format!("/v1/sessions/{id}/next")).await;
    let [i, j] = [next["pair"][0].clone(), next["pair"][1].clone()];
    let other = if i == json!(1) && j == json!(2) {
        json!([3, 4])
    } else {
        json!([1, 2])
    };
    let (status, body) = post(
        &app,
        &format!("/v1/sessions/{id}/answers"),
        json!({"i": other[0], "j": other[1], "value": 3}),
    )
    .await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::CONFLICT, Some("WrongPair"))
    );
    let (status, body) = post(
        &app,
        &format!("/v1/sessions/{id}/answers"),
        json!({"i": i, "j": j, "value": "2.5"}),
    )
    .await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("BadValue"))
    );

    let (status, _) = post(&app, &format!("/v1/sessions/{id}/abandon"), json!({})).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = post(
        &app,
        &format!("/v1/sessions/{id}/answers"),
        json!({"i": i, "j": j, "value": 3}),
    )
    .await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::CONFLICT, Some("SessionClosed"))
    );

    let disconnected = "1,2,*,*\n1/2,1,*,*\n*,*,1,3\n*,*,1/3,1\n";
    let (status, body) = post(&app, "/v1/analyze", json!({"matrix": disconnected})).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("DisconnectedGraph"))
    );

    let (status, _) = get(&app, "/v1/ri?n=five&m=2").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = get(&app, "/v1/ri?n=4&m=9").await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("OutOfRange"))
    );
    let (status, _) = post(
        &app,
        "/v1/complete",
        json!({"matrix": fixture("example2.csv"), "method": "magic"}),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn answer_replay_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app, json!({"n": 6, "policy": "ross"})).await;
    let matrix = fixture("example7.csv");
    let first = answer_from(&app, &id, &matrix, 6).await;
    let (_, before) = get(&app, &format!("/v1/sessions/{id}/report")).await;

    // a12 = 2 in the example7 fixture; resubmitting it, in either orientation, changes nothing
    let url = format!("/v1/sessions/{id}/answers");
    let (status, body) = post(&app, &url, json!({"i": 1, "j": 2, "value": "2"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["answered_count"], first[0]["answered_count"]);
    let (status, _) = post(&app, &url, json!({"i": 2, "j": 1, "value": "1/2"})).await;
    assert_eq!(status, StatusCode::OK);
    let pcm = parse_pcm(&matrix).unwrap();
    let [i, j] = [
        first[1]["pair"][0].as_u64().unwrap() as usize,
        first[1]["pair"][1].as_u64().unwrap() as usize,
    ];
    let value = pcm.judgment(i - 1, j - 1).unwrap().to_token();
    let (status, body) = post(&app, &url, json!({"i": i, "j": j, "value": value})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["answered_count"], json!(2));
    assert_eq!(body["connected"], json!(false));
    assert_eq!(body["next_pair"], first[5]["next_pair"]);

    let (status, body) = post(&app, &url, json!({"i": 1, "j": 2, "value": "5"})).await;
    assert_eq!(
        (status, body["error"].as_str()),
        (StatusCode::CONFLICT, Some("ConflictingAnswer"))
    );
    let (_, after) = get(&app, &format!("/v1/sessions/{id}/report")).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn sessions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = fixture("example7.csv");
    let (id, report) = {
        let app = app(dir.path());
        let id = create(
            &app,
            json!({"n": 6, "labels": ["a", "b", "c", "d", "e", "f"], "policy": "balanced"}),
        )
        .await;
        answer_from(&app, &id, &matrix, 11).await;
        let (_, report) = get(&app, &format!("/v1/sessions/{id}/report")).await;
        (id, report)
    };
    let app = app(dir.path());
    let (status, again) = get(&app, &format!("/v1/sessions/{id}/report")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, report);

    // keep answering after the restart, then restart once more
    answer_from(&app, &id, &matrix, 4).await;
    let (_, done) = get(&app, &format!("/v1/sessions/{id}/report")).await;
    let app = crate::app(dir.path());
    let (_, reloaded) = get(&app, &format!("/v1/sessions/{id}/report")).await;
    assert_eq!(reloaded, done);
    assert_eq!(reloaded["status"], json!("completed"));
    assert_eq!(reloaded["labels"], json!(["a", "b", "c", "d", "e", "f"]));
}

#[tokio::test]
async fn torn_log_line_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = fixture("example7.csv");
    let (id, report) = {
        let app = app(dir.path());
        let id = create(&app, json!({"n": 6, "policy": "ross"})).await;
        answer_from(&app, &id, &matrix, 3).await;
        let (_, report) = get(&app, &format!("/v1/sessions/{id}/report")).await;
        (id, report)
    };
    let log = dir.path().join(&id).join("answers.log");
    let mut text = std::fs::read_to_string(&log).unwrap();
    assert_eq!(text.lines().count(), 3);
    text.push_str(r#"{"seq":3,"i":3,"j"#);
    std::fs::write(&log, text).unwrap();

    let app = app(dir.path());
    let (status, again) = get(&app, &format!("/v1/sessions/{id}/report")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, report);
}

#[tokio::test]
async fn concurrent_duplicate_answers_are_serialized() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app, json!({"n": 5})).await;
    let (_, next) = get(&app, &format!("/v1/sessions/{id}/next")).await;
    let body = json!({"i": next["pair"][0], "j": next["pair"][1], "value": 2});
    let url = format!("/v1/sessions/{id}/answers");
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let (app, url, body) = (app.clone(), url.clone(), body.clone());
            tokio::spawn(async move { post(&app, &url, body).await })
        })
        .collect();
    for t in tasks {
        let (status, resp) = t.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        assert_eq!(resp["answered_count"], json!(1));
    }
    let (_, doc) = get(&app, &format!("/v1/sessions/{id}")).await;
    assert_eq!(doc["answers"].as_array().unwrap().len(), 1);
}
