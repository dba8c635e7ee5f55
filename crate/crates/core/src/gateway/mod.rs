//! Prompting a chat model for scaffolds, parsing what comes back, and the
//! validate-and-repair loop.

mod backend;
mod prompt;

pub use backend::{ChatBackend, ChatMessage, ChatRequest, MockBackend, RemoteBackend};
pub use prompt::{build_prompt, response_schema, PromptSpec};

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::diagnostic::{has_errors, Diagnostic};
use crate::scaffold::{parse_groups, validate_set, Provenance, ResponseError, ScaffoldKind, ScaffoldSet};

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const API_KEY_VAR: &str = "SCAFFOLD_LLM_API_KEY";
pub const BASE_URL_VAR: &str = "SCAFFOLD_LLM_BASE_URL";

const REPAIR_HEADER: &str = "Your previous response had these problems:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BackendConfig {
    Remote {
        #[serde(rename = "baseUrl")]
        base_url: String,
    },
    Mock {
        #[serde(rename = "fixtureId")]
        fixture_id: String,
    },
}

impl BackendConfig {
    /// Remote backend at `SCAFFOLD_LLM_BASE_URL`, or the public endpoint.
    pub fn remote_from_env() -> Self {
        BackendConfig::Remote {
            base_url: std::env::var(BASE_URL_VAR).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct GenerationConfig {
    pub model: String,
    pub temperature: f64,
    pub max_repair_attempts: u32,
    pub max_prompt_rows: usize,
    pub backend: BackendConfig,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            model: "gpt-4o-mini".to_string(),
            temperature: 0.2,
            max_repair_attempts: 2,
            max_prompt_rows: 200,
            backend: BackendConfig::remote_from_env(),
        }
    }
}

impl GenerationConfig {
    pub fn mock(fixture_id: impl Into<String>) -> Self {
        GenerationConfig {
            backend: BackendConfig::Mock { fixture_id: fixture_id.into() },
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GatewayError {
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("model backend unreachable: {0}")]
    Transport(String),
    #[error("model backend rejected the credentials: {0}")]
    Auth(String),
    #[error("mock fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Response(#[from] ResponseError),
}

impl GatewayError {
    /// Failures of the model backend itself, as opposed to bad requests or
    /// unusable responses.
    pub fn is_backend_failure(&self) -> bool {
        matches!(
            self,
            GatewayError::Transport(_) | GatewayError::Auth(_) | GatewayError::Fixture(_)
        )
    }
}

/// Opens the backend named by the config. Mock fixtures are looked up in
/// `fixtures_dir`; the remote key comes from `SCAFFOLD_LLM_API_KEY`.
pub fn open_backend(
    cfg: &GenerationConfig,
    fixtures_dir: &Path,
) -> Result<Box<dyn ChatBackend>, GatewayError> {
    Ok(match &cfg.backend {
        BackendConfig::Mock { fixture_id } => Box::new(MockBackend::load(fixtures_dir, fixture_id)?),
        BackendConfig::Remote { base_url } => Box::new(RemoteBackend::new(
            base_url.clone(),
            std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty()),
        )?),
    })
}

fn request(prompt: &PromptSpec, cfg: &GenerationConfig, messages: Vec<ChatMessage>) -> ChatRequest {
    ChatRequest {
        model: cfg.model.clone(),
        temperature: cfg.temperature,
        messages,
        response_schema: prompt.response_schema.clone(),
    }
}

fn read_response(
    content: &str,
    task: &ScaffoldKind,
    cfg: &GenerationConfig,
    attempts: u32,
) -> Result<ScaffoldSet, ResponseError> {
    let value: Value = serde_json::from_str(content)
        .map_err(|e| ResponseError::Shape(format!("response is not valid JSON: {e}")))?;
    let groups = parse_groups(&value, true)?;
    Ok(ScaffoldSet {
        kind: task.clone(),
        groups,
        provenance: Provenance::Llm { model: cfg.model.clone(), attempts },
    })
}

/// One round trip: send the prompt, parse the groups. No validation against
/// the dataset happens here.
pub fn generate(
    backend: &dyn ChatBackend,
    prompt: &PromptSpec,
    cfg: &GenerationConfig,
) -> Result<ScaffoldSet, GatewayError> {
    let messages = vec![
        ChatMessage::new("system", prompt.system.clone()),
        ChatMessage::new("user", prompt.user.clone()),
    ];
    let content = backend.complete(&request(prompt, cfg, messages))?;
    Ok(read_response(&content, &prompt.task, cfg, 1)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub set: ScaffoldSet,
    pub diagnostics: Vec<Diagnostic>,
    pub attempts_used: u32,
}

/// Follow-up message listing each distinct error message once.
pub fn repair_message(diagnostics: &[Diagnostic]) -> String {
    let mut seen: Vec<&str> = Vec::new();
    for d in diagnostics.iter().filter(|d| d.is_error()) {
        if !seen.contains(&d.message.as_str()) {
            seen.push(&d.message);
        }
    }
    let mut text = String::from(REPAIR_HEADER);
    for m in seen {
        text.push_str("\n- ");
        text.push_str(m);
    }
    text.push_str(
        "\n\nReturn a corrected JSON object in the same {\"groups\": [...]} format, \
         keeping the groupings that had no problems.",
    );
    text
}

/// Generates, validates, and re-prompts with the error diagnostics until a
/// response has no errors or the attempts run out. Running out is not an
/// error: the last set comes back with its diagnostics. A last response that
/// cannot be parsed at all is.
pub fn generate_validated(
    backend: &dyn ChatBackend,
    d: &Dataset,
    task: &ScaffoldKind,
    cfg: &GenerationConfig,
) -> Result<Generation, GatewayError> {
    let prompt = build_prompt(d, task, cfg)?;
    let max_attempts = 1 + cfg.max_repair_attempts;
    let mut messages = vec![
        ChatMessage::new("system", prompt.system.clone()),
        ChatMessage::new("user", prompt.user.clone()),
    ];

    for attempt in 1..=max_attempts {
        let content = backend.complete(&request(&prompt, cfg, messages.clone()))?;
        let diagnostics = match read_response(&content, task, cfg, attempt) {
            Ok(set) => {
                let diagnostics = validate_set(&set, d);
                if !has_errors(&diagnostics) || attempt == max_attempts {
                    tracing::debug!(attempt, errors = has_errors(&diagnostics), "generation finished");
                    return Ok(Generation { set, diagnostics, attempts_used: attempt });
                }
                diagnostics
            }
            Err(e) if attempt < max_attempts => vec![e.to_diagnostic()],
            Err(e) => return Err(e.into()),
        };
        tracing::debug!(attempt, problems = diagnostics.len(), "re-prompting");
        messages.push(ChatMessage::new("assistant", content));
        messages.push(ChatMessage::new("user", repair_message(&diagnostics)));
    }
    unreachable!("the final attempt always returns")
}
