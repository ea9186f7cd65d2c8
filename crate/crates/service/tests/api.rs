use axum::body::Body;
use axum::http::{header, HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use teamforge_core::profile::{Quartet, SocioProfile};
use teamforge_core::session::AcquisitionSession;
use teamforge_core::team::{Candidate, OrgChart, Position, Role};
use teamforge_service::{router, AppState};

fn candidate(id: &str, role: &str, q: Option<[i64; 4]>) -> Candidate {
    Candidate {
        id: id.into(),
        name: format!("Name {id}"),
        contact: format!("{id}@example.org"),
        aspired_role: role.into(),
        profile: q.map(|q| SocioProfile::new(Quartet::from(q), Quartet::from(q))),
        qol: None,
        technical: [("team_lead".to_string(), 70.0), ("developer".to_string(), 80.0)].into(),
    }
}

fn session() -> AcquisitionSession {
    let chart = OrgChart {
        roles: vec![
            Role { id: "team_lead".into(), title: "Team lead".into() },
            Role { id: "developer".into(), title: "Developer".into() },
        ],
        positions: vec![
            Position { id: "lead".into(), role: "team_lead".into(), parent: None, headcount: 1 },
            Position { id: "dev".into(), role: "developer".into(), parent: Some("lead".into()), headcount: 1 },
        ],
    };
    let mut s = AcquisitionSession::new("Project 5", chart);
    s.set_pool(vec![
        candidate("c1", "team_lead", Some([11, 23, 14, 12])),
        candidate("c2", "developer", Some([15, 15, 15, 15])),
        candidate("c3", "developer", Some([14, 16, 16, 14])),
    ])
    .unwrap();
    s
}

fn app() -> Router {
    router(AppState::new(session(), None))
}

struct Reply {
    status: StatusCode,
    headers: HeaderMap,
    body: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }

    fn etag(&self) -> &str {
        self.headers.get(header::ETAG).unwrap().to_str().unwrap()
    }
}

async fn call(app: &Router, method: Method, uri: &str, headers: &[(&str, &str)], body: &str) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let res = app
        .clone()
        .oneshot(req.body(Body::from(body.to_string())).unwrap())
        .await
        .unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        headers,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

async fn revision(app: &Router) -> u64 {
    call(app, Method::GET, "/api/v1/workspace", &[], "").await.json()["revision"]
        .as_u64()
        .unwrap()
}

const WORKED: &str = r#"{
  "questionnaire1": [[2,3,4,1],[2,4,1,3],[2,4,3,1],[2,3,4,1],[2,4,1,3],[2,4,3,1]],
  "questionnaire2": [[1,4,2,3],[2,4,1,3],[2,4,3,1],[1,4,2,3],[2,4,1,3],[2,4,3,1]]
}"#;

#[tokio::test]
async fn workspace_snapshot() {
    let app = app();
    let r = call(&app, Method::GET, "/api/v1/workspace", &[], "").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.etag(), "\"0\"");
    assert_eq!(r.json()["session"]["project"], "Project 5");
}

#[tokio::test]
async fn score_worked_example() {
    let app = app();
    let r = call(&app, Method::POST, "/api/v1/score/c1", &[], WORKED).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = r.json();
    assert_eq!(v["profile"]["normal"], json!({"Z": 11, "X": 23, "W": 14, "Y": 12}));
    assert_eq!(v["profile"]["tense"], json!({"Z": 11, "X": 23, "W": 14, "Y": 12}));
    assert_eq!(v["assessment"]["normal"]["style"]["kind"], "MajorMinor");
    assert_eq!(v["assessment"]["normal"]["style"]["dominant_trait"], "Controller");
    assert_eq!(revision(&app).await, 0);

    let r = call(&app, Method::POST, "/api/v1/score/nobody", &[], WORKED).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::POST, "/api/v1/score/c1", &[], r#"{"questionnaire1": []}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert!(!r.json()["violations"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn balance_is_what_if() {
    let app = app();
    let r = call(&app, Method::POST, "/api/v1/balance", &[], r#"{"pairs": {"lead": "c2"}}"#).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = r.json();
    assert_eq!(v["balance"]["balanced"], true);
    assert_eq!(v["balance"]["max_column_gap_normal"], "0");
    assert_eq!(v["balance"]["max_column_gap_tense"], "0");
    let r = call(&app, Method::POST, "/api/v1/balance", &[], r#"{"pairs": {"lead": "c1", "dev": "c2"}}"#).await;
    assert_eq!(r.json()["balance"]["balanced"], false);
    assert_eq!(revision(&app).await, 0);
    let r = call(&app, Method::POST, "/api/v1/balance", &[], r#"{"pairs": {"lead": "ghost"}}"#).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::POST, "/api/v1/balance", &[], r#"{"pairs": "#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "ParseError");
}

#[tokio::test]
async fn recommend_accept_and_conflicts() {
    let app = app();
    let r = call(&app, Method::POST, "/api/v1/recommend", &[], "").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["search_meta"]["strategy"], "exhaustive");
    assert_eq!(revision(&app).await, 0);

    let r = call(&app, Method::POST, "/api/v1/recommend?accept=true", &[], "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "MissingIfMatch");

    let r = call(&app, Method::POST, "/api/v1/recommend?accept=true", &[("if-match", "0")], "").await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.etag(), "\"1\"");

    // replaying against the old revision never overwrites
    let before = call(&app, Method::GET, "/api/v1/workspace", &[], "").await.body;
    let r = call(&app, Method::POST, "/api/v1/recommend?accept=true&seed=5", &[("if-match", "\"0\"")], "").await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["revision"], 1);
    assert_eq!(call(&app, Method::GET, "/api/v1/workspace", &[], "").await.body, before);
}

#[tokio::test]
async fn override_flow() {
    let app = app();
    let r = call(&app, Method::POST, "/api/v1/override", &[("if-match", "0")], r#"{"edits": []}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "NoProposal");

    call(&app, Method::POST, "/api/v1/recommend?accept=true", &[("if-match", "0")], "").await;
    let conflicting = r#"{"edits": [{"position": "lead", "candidate": "c3"}, {"position": "dev", "candidate": "c3"}]}"#;
    let r = call(&app, Method::POST, "/api/v1/override", &[("if-match", "1")], conflicting).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "ConflictingEdit");
    assert_eq!(revision(&app).await, 1);

    let edits = r#"{"edits": [{"position": "lead", "candidate": null}]}"#;
    let r = call(&app, Method::POST, "/api/v1/override", &[("if-match", "1")], edits).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.json()["search_meta"]["strategy"], "expert-override");
    assert_eq!(r.etag(), "\"2\"");

    let r = call(&app, Method::GET, "/api/v1/report/acquisition?format=text", &[], "").await;
    assert!(r.body.contains("#1 exhaustive"), "{}", r.body);
    assert!(r.body.contains("#2 expert-override"));
    assert!(r.body.contains("edit: clear lead"));
    let r = call(&app, Method::GET, "/api/v1/report/completion?format=text", &[], "").await;
    assert!(r.body.contains("Unfilled positions: lead"), "{}", r.body);
}

#[tokio::test]
async fn pool_replacement() {
    let app = app();
    let bad = r#"[{"id": "x", "name": "X", "aspired_role": "astronaut"}]"#;
    let r = call(&app, Method::POST, "/api/v1/pool", &[("if-match", "0")], bad).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["violations"][0]["kind"], "UnknownAspiredRole");
    assert_eq!(revision(&app).await, 0);

    let csv = "name,contact,aspired_role\nAna,ana@x,team_lead\nBo,bo@x,developer\n";
    let r = call(&app, Method::POST, "/api/v1/pool", &[("if-match", "0"), ("content-type", "text/csv")], csv).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.json()["candidates"], 2);
    assert_eq!(revision(&app).await, 1);
    // unscored candidates cannot be recommended yet
    let r = call(&app, Method::POST, "/api/v1/recommend", &[], "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "UnscoredCandidate");
}

#[tokio::test]
async fn wilcoxon_endpoint() {
    let app = app();
    let body = json!({"pairs": (1..=5).map(|i| json!({"unit": format!("u{i}"), "before": 0.0, "after": i as f64})).collect::<Vec<_>>(), "alpha": 0.1});
    let r = call(&app, Method::POST, "/api/v1/evaluate/wilcoxon", &[], &body.to_string()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = r.json();
    assert_eq!(v["p_value"], 0.0625);
    assert_eq!(v["significant"], true);
    let r = call(&app, Method::POST, "/api/v1/evaluate/wilcoxon", &[], r#"{"pairs": []}"#).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn reports_and_workspaces() {
    let state = AppState::new(session(), None);
    state.insert_workspace("other", AcquisitionSession::new("Empty", OrgChart::default())).await;
    let app = router(state);
    let r = call(&app, Method::GET, "/api/v1/report/completion", &[], "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "NoFinalAssignment");
    let r = call(&app, Method::GET, "/api/v1/report/bogus", &[], "").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::GET, "/api/v1/report/acquisition?format=text", &[("x-workspace", "other")], "").await;
    assert!(r.body.contains("0 candidates evaluated"));
    let r = call(&app, Method::GET, "/api/v1/workspace", &[("x-workspace", "missing")], "").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    let r = call(&app, Method::POST, "/api/v1/save", &[], "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn save_writes_session() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let app = router(AppState::new(session(), Some(path.clone())));
    let r = call(&app, Method::POST, "/api/v1/save", &[], "").await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(teamforge_core::session::load_session(&path).unwrap(), session());
}

#[tokio::test]
async fn concurrent_mutations_serialize() {
    let app = app();
    let mut handles = Vec::new();
    for _ in 0..8 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            call(&app, Method::POST, "/api/v1/recommend?accept=true", &[("if-match", "0")], "").await.status
        }));
    }
    let mut ok = 0;
    let mut conflict = 0;
    for h in handles {
        match h.await.unwrap() {
            StatusCode::OK => ok += 1,
            StatusCode::CONFLICT => conflict += 1,
            s => panic!("unexpected {s}"),
        }
    }
    assert_eq!((ok, conflict), (1, 7));
    assert_eq!(revision(&app).await, 1);
}
