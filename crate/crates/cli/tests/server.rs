use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

use knotcover_cli::server::{router, AppState, ErrorBody, Opened, SceneInfo};
use knotcover_core::protocol::{FrameState, StepRequest};

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn open(app: &axum::Router, scene: &str) -> Opened {
    let (s, body) = call(app, "POST", "/sessions", Some(format!(r#"{{"scene": "{scene}", "width": 64, "height": 48}}"#))).await;
    assert_eq!(s, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
    serde_json::from_slice(&body).unwrap()
}

async fn step(app: &axum::Router, id: u64, req: &StepRequest) -> FrameState {
    let (s, body) = call(app, "POST", &format!("/sessions/{id}/step"), Some(serde_json::to_string(req).unwrap())).await;
    assert_eq!(s, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
    serde_json::from_slice(&body).unwrap()
}

fn walk(forward: f64) -> StepRequest {
    StepRequest {
        dt: 1.0 / 60.0,
        movement: [0.0, forward, 0.0],
        look: [0.0, 0.0],
    }
}

#[tokio::test]
async fn scene_listing() {
    let app = router(AppState::default());
    let (s, body) = call(&app, "GET", "/scenes", None).await;
    assert_eq!(s, StatusCode::OK);
    let scenes: Vec<SceneInfo> = serde_json::from_slice(&body).unwrap();
    assert_eq!(scenes.len(), 6);
    let trefoil = scenes.iter().find(|s| s.name == "trefoil").unwrap();
    assert_eq!(trefoil.worlds.len(), 6);
}

#[tokio::test]
async fn unknot_walkthrough_flips_and_returns() {
    let app = router(AppState::default());
    let opened = open(&app, "unknot").await;
    assert_eq!(opened.state.world, "e");
    assert_eq!(opened.state.legend.len(), 2);
    let mut worlds = vec![];
    for _ in 0..20 {
        worlds.push(step(&app, opened.id, &walk(1.0)).await.world);
    }
    assert_eq!(worlds.last().unwrap(), "a");
    for _ in 0..20 {
        worlds.push(step(&app, opened.id, &walk(-1.0)).await.world);
    }
    assert_eq!(worlds.last().unwrap(), "e");
    // exactly one flip each way
    let flips = worlds.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 2);
    let (_, body) = call(&app, "GET", &format!("/sessions/{}", opened.id), None).await;
    let now: FrameState = serde_json::from_slice(&body).unwrap();
    assert_eq!(now.world, "e");
}

#[tokio::test]
async fn errors_are_reported_not_fatal() {
    let app = router(AppState::default());
    let (s, body) = call(&app, "POST", "/sessions", Some(r#"{"scene": "nope"}"#.into())).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert!(err.error.contains("nope"));
    let (s, _) = call(&app, "POST", "/sessions/99/step", Some(serde_json::to_string(&walk(1.0)).unwrap())).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "POST", "/sessions", Some(r#"{"scene": "hopf"}"#.into())).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let opened = open(&app, "unknot").await;
    let (s, _) = call(&app, "POST", &format!("/sessions/{}/step", opened.id), Some(r#"{"dt": -1}"#.into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    // still usable
    assert_eq!(step(&app, opened.id, &walk(1.0)).await.world, "e");
}

#[tokio::test]
async fn trefoil_walk_matches_the_cli_transport() {
    let app = router(AppState::default());
    let opened = open(&app, "trefoil").await;
    let mut points = vec![opened.state.pose.position];
    let mut seen = vec![opened.state.world.clone()];
    // straight across the knot, then a sidestep and back
    let script: Vec<StepRequest> = std::iter::repeat(walk(1.0))
        .take(30)
        .chain(std::iter::repeat(StepRequest {
            dt: 1.0 / 60.0,
            movement: [1.0, 0.0, 0.0],
            look: [0.0, 0.0],
        }).take(8))
        .chain(std::iter::repeat(walk(-1.0)).take(30))
        .collect();
    for req in &script {
        let f = step(&app, opened.id, req).await;
        points.push(f.pose.position);
        seen.extend(f.events.iter().map(|e| e.to.clone()));
        assert_eq!(seen.last().unwrap(), &f.world);
    }
    let distinct: std::collections::BTreeSet<_> = seen.iter().collect();
    assert!(distinct.len() >= 3, "{seen:?}");

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("walk.csv");
    let text: String = points.iter().map(|p| format!("{:?},{:?},{:?}\n", p[0], p[1], p[2])).collect();
    std::fs::write(&csv, text).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_knotcover"))
        .args(["transport", "trefoil", "--path", csv.to_str().unwrap(), "--start", "e"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    let mut expected = vec!["e".to_string()];
    for line in report.lines().filter(|l| l.starts_with("t=")) {
        expected.push(line.rsplit(' ').next().unwrap().to_string());
    }
    assert_eq!(seen, expected);
}
