use std::sync::Arc;

use acetab::service::{router, AppState};
use acetab::store::PlanStore;
use acetab_core::ImplantCatalog;
use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub struct Api {
    pub state: Arc<AppState>,
    pub app: Router,
    pub _dir: tempfile::TempDir,
}

impl Api {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = PlanStore::open(dir.path().join("plans")).unwrap();
        let state = AppState::new(ImplantCatalog::standard("Versys"), store);
        Api {
            app: router(state.clone()),
            state,
            _dir: dir,
        }
    }

    pub async fn raw(&self, method: Method, uri: &str, content_type: Option<&str>, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(ct) = content_type {
            req = req.header(header::CONTENT_TYPE, ct);
        }
        let resp = self.app.clone().oneshot(req.body(Body::from(body)).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    pub async fn json(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = match body {
            Some(v) => self.raw(method, uri, Some("application/json"), v.to_string().into_bytes()).await,
            None => self.raw(method, uri, None, Vec::new()).await,
        };
        let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
        (status, value)
    }

    /// New session from the PNG fixture.
    pub async fn session(&self) -> String {
        let png = std::fs::read(super::fixture("synthetic_pelvis.png")).unwrap();
        let (status, bytes) = self.raw(Method::POST, "/sessions", Some("image/png"), png).await;
        assert_eq!(status, StatusCode::CREATED);
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        v["session_id"].as_str().unwrap().to_string()
    }
}
