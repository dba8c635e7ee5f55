//! Golden HTTP scenarios and CLI invocation helpers shared by the contract
//! tests and the acceptance harness.
#![allow(dead_code)]

use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower::ServiceExt;

use scaffold_cli::service::{router, AppState, ServiceConfig};
use scaffold_core::gateway::{BackendConfig, GenerationConfig};

pub fn tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn core_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// A port nothing listens on, so remote generation fails fast.
pub fn dead_endpoint() -> String {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    format!("http://127.0.0.1:{port}")
}

pub fn test_config() -> ServiceConfig {
    ServiceConfig {
        generation: GenerationConfig {
            backend: BackendConfig::Remote { base_url: dead_endpoint() },
            ..GenerationConfig::default()
        },
        ..ServiceConfig::new(tests_dir().join("fixtures/mock"))
    }
}

pub fn app(config: ServiceConfig) -> Router {
    router(AppState::new(config).unwrap())
}

pub struct Reply {
    pub status: StatusCode,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }
}

pub async fn call(app: &Router, method: &str, path: &str, body: Option<String>) -> Reply {
    let mut req = Request::builder().method(method).uri(path);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let response = app.clone().oneshot(req).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    Reply { status, text: String::from_utf8(bytes.to_vec()).unwrap() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Step {
    pub name: String,
    pub method: String,
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Value>,
    pub status: u16,
    pub response: Value,
}

pub fn golden_path(name: &str) -> PathBuf {
    tests_dir().join("golden").join(name)
}

pub fn load_scenario(name: &str) -> Vec<Step> {
    let text = std::fs::read_to_string(golden_path(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Plays the steps against a fresh service. Each body must match the golden
/// response byte for byte once both are in compact form. Returns the
/// mismatches; with `UPDATE_GOLDEN` set the file is rewritten instead.
pub async fn run_scenario(name: &str) -> Vec<String> {
    let steps = load_scenario(name);
    let app = app(test_config());
    let mut failures = Vec::new();
    let mut recorded = Vec::new();
    for step in &steps {
        let body = step.body.as_ref().map(|b| match b {
            Value::String(raw) => raw.clone(),
            other => other.to_string(),
        });
        let reply = call(&app, &step.method, &step.path, body).await;
        let expected = serde_json::to_string(&step.response).unwrap();
        if reply.status.as_u16() != step.status {
            failures.push(format!("{}: status {} != {}: {}", step.name, reply.status, step.status, reply.text));
        } else if reply.text != expected {
            failures.push(format!("{}: body differs {}", step.name, first_difference(&reply.text, &expected)));
        }
        recorded.push(Step { status: reply.status.as_u16(), response: reply.json(), ..step.clone() });
    }
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let text = serde_json::to_string_pretty(&recorded).unwrap() + "\n";
        std::fs::write(golden_path(name), text).unwrap();
    }
    failures
}

fn first_difference(got: &str, expected: &str) -> String {
    let at = got.bytes().zip(expected.bytes()).take_while(|(a, b)| a == b).count();
    let window = |s: &str| s.get(at.saturating_sub(40)..(at + 80).min(s.len())).unwrap_or(s).to_string();
    format!("at byte {at}\n  got      ...{}\n  expected ...{}", window(got), window(expected))
}

pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["scaffold".to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    let code = scaffold_cli::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
