use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::GatewayError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        ChatMessage { role: role.to_string(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
    pub response_schema: Value,
}

impl ChatRequest {
    /// Body for an OpenAI-compatible `chat/completions` call.
    pub fn to_body(&self) -> Value {
        json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": self.messages,
            "response_format": {
                "type": "json_schema",
                "json_schema": {
                    "name": "semantic_scaffolds",
                    "schema": self.response_schema,
                    "strict": false
                }
            }
        })
    }
}

/// Something that answers a chat request with the assistant's text.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError>;
}

/// Models often wrap JSON in a markdown fence despite being told not to.
pub(crate) fn strip_code_fence(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else {
        return t;
    };
    let Some(body) = rest.strip_suffix("```") else {
        return t;
    };
    let body = body.strip_prefix("json").unwrap_or(body);
    body.trim()
}

/// Replays canned responses from `{dir}/{id}.json`, a JSON array whose
/// items are response objects or raw strings. After the last item the last
/// response repeats. Every request is recorded.
pub struct MockBackend {
    id: String,
    responses: Vec<String>,
    state: Mutex<MockState>,
}

#[derive(Default)]
struct MockState {
    next: usize,
    requests: Vec<ChatRequest>,
}

fn valid_fixture_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        && !id.starts_with('.')
}

impl MockBackend {
    pub fn from_responses(id: impl Into<String>, responses: Vec<String>) -> Self {
        MockBackend { id: id.into(), responses, state: Mutex::new(MockState::default()) }
    }

    pub fn load(dir: &Path, id: &str) -> Result<Self, GatewayError> {
        if !valid_fixture_id(id) {
            return Err(GatewayError::Fixture(format!("invalid fixture id {id:?}")));
        }
        let path: PathBuf = dir.join(format!("{id}.json"));
        let text = std::fs::read_to_string(&path).map_err(|e| {
            GatewayError::Fixture(format!("cannot read fixture {}: {e}", path.display()))
        })?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| GatewayError::Fixture(format!("{}: {e}", path.display())))?;
        let Value::Array(items) = value else {
            return Err(GatewayError::Fixture(format!(
                "{}: expected an array of responses",
                path.display()
            )));
        };
        if items.is_empty() {
            return Err(GatewayError::Fixture(format!("{}: no responses", path.display())));
        }
        let responses = items
            .into_iter()
            .map(|item| match item {
                Value::String(s) => s,
                other => other.to_string(),
            })
            .collect();
        Ok(Self::from_responses(id, responses))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.state.lock().expect("mock state poisoned").requests.clone()
    }
}

impl ChatBackend for MockBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let mut state = self.state.lock().expect("mock state poisoned");
        state.requests.push(request.clone());
        let i = state.next.min(self.responses.len() - 1);
        state.next += 1;
        Ok(strip_code_fence(&self.responses[i]).to_string())
    }
}

/// OpenAI-compatible endpoint over blocking HTTP. Do not call from inside an
/// async runtime thread.
pub struct RemoteBackend {
    base_url: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl RemoteBackend {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Result<Self, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(RemoteBackend {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key,
            client,
        })
    }
}

fn excerpt(body: &str) -> String {
    let t = body.trim();
    match t.char_indices().nth(300) {
        Some((i, _)) => format!("{}...", &t[..i]),
        None => t.to_string(),
    }
}

impl ChatBackend for RemoteBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let url = format!("{}/chat/completions", self.base_url);
        let mut call = self.client.post(&url).json(&request.to_body());
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let response = call
            .send()
            .map_err(|e| GatewayError::Transport(format!("{url}: {e}")))?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| GatewayError::Transport(format!("{url}: {e}")))?;
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(GatewayError::Auth(format!("{url} returned {status}: {}", excerpt(&body))));
        }
        if !status.is_success() {
            return Err(GatewayError::Transport(format!(
                "{url} returned {status}: {}",
                excerpt(&body)
            )));
        }
        let value: Value = serde_json::from_str(&body).map_err(|e| {
            GatewayError::Transport(format!("{url} returned a non-JSON body: {e}"))
        })?;
        let content = value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| {
                GatewayError::Transport(format!("{url} returned no message content"))
            })?;
        Ok(strip_code_fence(content).to_string())
    }
}
