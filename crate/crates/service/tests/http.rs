use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use stepcalc::fixtures;
use stepcalc::worksheet::load;
use stepcalc_service::{router, AppState, Store};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(body)).await
}

fn app() -> Router {
    router(AppState::new(Store::in_memory()))
}

fn cell<'a>(doc: &'a Value, id: &str) -> &'a Value {
    doc["cells"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap()
}

async fn cherries(app: &Router) -> String {
    let (status, body) = post(app, "/worksheets", json!({ "fixture": "cherries" })).await;
    assert_eq!(status, StatusCode::CREATED);
    body["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn learner_story() {
    let app = app();
    let id = cherries(&app).await;

    let (status, body) = post(&app, &format!("/worksheets/{id}/run"), json!(null)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["event"]["kind"], "run_completed");
    assert_eq!(cell(&body["document"], "answer")["computed"], "6 min");
    assert_eq!(cell(&body["document"], "U")["computed"], "3 cherry/min");

    let (status, body) = post(&app, &format!("/worksheets/{id}/cells/C"), json!({ "content": "48 cherry" })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["event"]["kind"], "cell_edited");
    assert!(cell(&body["document"], "answer")["computed"].is_null());
    let (_, body) = post(&app, &format!("/worksheets/{id}/run"), json!(null)).await;
    assert_eq!(cell(&body["document"], "U")["computed"], "2 cherry/min");
    assert_eq!(cell(&body["document"], "answer")["computed"], "6 min");

    let (status, body) = post(&app, &format!("/worksheets/{id}/symbolize"), json!({ "cell": "A" })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["event"]["kind"], "symbolized");
    assert_eq!(cell(&body["document"], "A")["content"], "A min");
    let (_, body) = post(&app, &format!("/worksheets/{id}/run"), json!(null)).await;
    assert_eq!(cell(&body["document"], "answer")["computed"], "8*A/(A + 8) min");
    assert_eq!(body["document"]["result"]["mode"], "name");

    let (_, events) = call(&app, Method::GET, &format!("/worksheets/{id}/events"), None).await;
    let revisions: Vec<u64> = events.as_array().unwrap().iter().map(|e| e["revision"].as_u64().unwrap()).collect();
    assert_eq!(revisions.len(), 5);
    assert!(revisions.windows(2).all(|w| w[0] < w[1]), "{revisions:?}");

    let (_, body) = post(&app, &format!("/worksheets/{id}/reset"), json!(null)).await;
    assert_eq!(cell(&body["document"], "A")["content"], "24 min");
    assert_eq!(cell(&body["document"], "C")["content"], "72 cherry");
}

#[tokio::test]
async fn run_errors_are_events_on_the_step() {
    let app = app();
    let id = cherries(&app).await;
    post(&app, &format!("/worksheets/{id}/cells/A"), json!({ "content": "0 min" })).await;
    let (status, body) = post(&app, &format!("/worksheets/{id}/run"), json!(null)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["event"]["kind"], "error");
    let err = &body["event"]["payload"];
    assert_eq!(err["step"], "U");
    assert_eq!(err["cell"], "U");
    assert_eq!(err["code"], "division_by_zero");
    assert_eq!(body["document"]["result"]["error"], *err);
}

#[tokio::test]
async fn rejected_edits() {
    let app = app();
    let id = cherries(&app).await;
    let path = format!("/worksheets/{id}/cells");

    let (status, err) = post(&app, &format!("{path}/U"), json!({ "content": "1" })).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err, json!({ "step": null, "cell": "U", "code": "not_editable", "message": "cell `U` is computed and cannot be edited" }));

    let (status, err) = post(&app, &format!("{path}/C"), json!({ "content": "72 furlong" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!((err["code"].as_str(), err["cell"].as_str()), (Some("unknown_unit"), Some("C")));

    let (status, err) = post(&app, &format!("{path}/Q"), json!({ "content": "1" })).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_cell")));

    let (status, err) = post(&app, &format!("{path}/C"), json!({ "content": "1 cherry", "revision": 5 })).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::CONFLICT, Some("stale_revision")));

    let (status, err) = post(&app, &format!("{path}/C"), json!({ "text": "1" })).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("invalid_request")));

    let (status, err) = call(&app, Method::GET, "/worksheets/nope", None).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("not_found")));

    // Nothing above changed the worksheet.
    let (_, body) = call(&app, Method::GET, &format!("/worksheets/{id}"), None).await;
    assert_eq!(body["document"]["revision"], 0);
}

#[tokio::test]
async fn create_from_source_and_document() {
    let app = app();
    let source = "unit min\ndata A = 24 min\ndata B = 8 min\nT := (A*B)/(A + B)\nreturn T\n";
    let (status, body) = post(&app, "/worksheets", json!({ "source": source, "title": "Formula" })).await;
    assert_eq!(status, StatusCode::CREATED);
    let kinds: Vec<&str> = body["document"]["cells"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["data", "data", "step", "answer"]);
    assert_eq!(body["document"]["title"], "Formula");

    let (status, copy) = post(&app, "/worksheets", json!({ "document": body["document"] })).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_ne!(copy["id"], body["id"]);
    assert_eq!(copy["document"], body["document"]);

    let (status, err) = post(&app, "/worksheets", json!({ "source": "return Q" })).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("use_before_definition")));
    let mut doc = body["document"].clone();
    doc["version"] = json!(2);
    let (status, err) = post(&app, "/worksheets", json!({ "document": doc })).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("schema_version_mismatch")));
    let (status, _) = post(&app, "/worksheets", json!({ "source": source, "fixture": "cherries" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (_, list) = call(&app, Method::GET, "/worksheets", None).await;
    assert_eq!(list.as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn documents_persist() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Store::open(dir.path()).await.unwrap()));
    let id = cherries(&app).await;
    post(&app, &format!("/worksheets/{id}/cells/C"), json!({ "content": "48 cherry" })).await;
    let (_, body) = post(&app, &format!("/worksheets/{id}/run"), json!(null)).await;

    let file = std::fs::read_to_string(dir.path().join(format!("{id}.json"))).unwrap();
    let saved: Value = serde_json::from_str(&file).unwrap();
    assert_eq!(saved, body["document"]);
    assert_eq!(load(&file).unwrap().revision, 2);

    let reopened = router(AppState::new(Store::open(dir.path()).await.unwrap()));
    let (status, again) = call(&reopened, Method::GET, &format!("/worksheets/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["document"], body["document"]);
}

#[tokio::test]
async fn concurrent_edits_are_serialized() {
    let app = app();
    let id = cherries(&app).await;
    let mut tasks = Vec::new();
    for k in 1..=20 {
        let app = app.clone();
        let uri = format!("/worksheets/{id}/cells/C");
        tasks.push(tokio::spawn(async move {
            post(&app, &uri, json!({ "content": format!("{k} cherry") })).await
        }));
    }
    let mut revisions = Vec::new();
    for t in tasks {
        let (status, body) = t.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        revisions.push(body["event"]["revision"].as_u64().unwrap());
    }
    revisions.sort();
    assert_eq!(revisions, (1..=20).collect::<Vec<_>>());
}

#[tokio::test]
async fn program_endpoints() {
    let app = app();
    let source = fixtures::get("cherries").unwrap().source;

    let (status, trace) = post(&app, "/programs/run", json!({ "source": source })).await;
    assert_eq!(status, StatusCode::OK);
    let values: Vec<&str> = trace["steps"].as_array().unwrap().iter().map(|s| s["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["3 cherry/min", "9 cherry/min", "12 cherry/min", "6 min"]);
    assert_eq!(trace["answer"], "6 min");

    let (_, trace) = post(&app, "/programs/run", json!({ "source": source, "overrides": { "C": "48 cherry" } })).await;
    assert_eq!(trace["steps"][0]["value"], "2 cherry/min");
    assert_eq!(trace["steps"][0]["equation"], "48 cherry/(24 min)");

    let (status, err) = post(&app, "/programs/run", json!({ "source": source, "overrides": { "A": "0 min" } })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!((err["step"].as_str(), err["code"].as_str()), (Some("U"), Some("division_by_zero")));

    let (_, solved) = post(&app, "/programs/solve", json!({ "source": source, "symbolize": ["A", "B", "C"] })).await;
    assert_eq!(solved["answer"], "A*B/(A + B) min");
    assert_eq!(solved["eliminated"], json!(["C"]));

    let kevin = fixtures::get("kevin").unwrap().source;
    let (_, solved) = post(&app, "/programs/solve", json!({ "source": kevin, "symbolize": ["A", "B", "K"] })).await;
    assert_eq!(solved["conditions"][0]["condition"], "-A*B + A*K + B*K > 0");

    let (_, checked) = post(&app, "/programs/check", json!({ "source": source, "trials": 20 })).await;
    assert_eq!(checked["independence"][0]["verdict"], "independent");
    assert_eq!(checked["agreement"]["passed"], true);
    assert_eq!(checked["agreement"]["agreed"], 20);

    let sunrise = fixtures::get("sunrise").unwrap().source;
    let (_, checked) = post(&app, "/programs/check", json!({ "source": sunrise, "trials": 5 })).await;
    assert_eq!(checked["independence_error"]["code"], "symbolic_radical_unsupported");
    assert_eq!(checked["agreement"]["passed"], true);
    let (status, err) = post(&app, "/programs/solve", json!({ "source": sunrise, "symbolize": ["a", "b"] })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!((err["code"].as_str(), err["step"].as_str()), (Some("symbolic_radical_unsupported"), Some("R")));

    let never = "data a = 2 min\nT := a/(a - a - a)\nreturn T";
    let (_, checked) = post(&app, "/programs/check", json!({ "source": never, "trials": 5 })).await;
    assert_eq!(checked["agreement"]["passed"], false);
    assert_eq!(checked["agreement"]["agreed"], 0);

    let (_, formatted) = post(&app, "/programs/fmt", json!({ "source": "data X=1;return X" })).await;
    assert_eq!(formatted["source"], "data X = 1\nreturn X\n");

    let (status, err) = post(&app, "/programs/fmt", json!({ "source": "data X = \nreturn X" })).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("syntax_error")));

    let (_, list) = call(&app, Method::GET, "/fixtures", None).await;
    assert_eq!(list.as_array().unwrap().len(), fixtures::ALL.len());
}
