//! AI dialogue generation against an OpenAI-compatible chat-completions
//! endpoint.
//!
//! A prompt matrix (rows of system prompt + user template, crossed with
//! topics for templates containing `{topic}`) is expanded into cells. Each
//! cell is replayed `count_per_cell` times; every replica is a multi-turn
//! dialogue where the running transcript is sent back with a fixed follow-up
//! user message. Failed dialogues are reported per record and never abort
//! the run.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use semdelta_core::{record_id, DialogueRecord, Label};

pub const TOPIC_PLACEHOLDER: &str = "{topic}";
pub const DEFAULT_FOLLOW_UP: &str = "Continue the conversation.";
pub const DEFAULT_CONCURRENCY: usize = 4;
pub const HELPFUL_ASSISTANT: &str = "You are a helpful assistant.";

/// Prompt matrix shipped with the tool. The persona prompts are this tool's
/// own defaults for "sound like a person" conditions.
pub const DEFAULT_PROMPTS_TSV: &str = include_str!("../prompts/default_prompts.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("API key variable {var} is not set")]
    AuthMissing { var: String },
    #[error("endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("HTTP {status}: {body}")]
    HttpStatus { status: u16, body: String },
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("prompts line {line}: {reason}")]
    Prompts { line: usize, reason: String },
}

impl GenError {
    fn retryable(&self) -> bool {
        match self {
            GenError::RateLimited { .. } | GenError::EndpointUnreachable(_) => true,
            GenError::HttpStatus { status, .. } => *status >= 500,
            _ => false,
        }
    }
}

fn default_turns() -> usize {
    3
}
fn default_temperature() -> f64 {
    1.0
}
fn default_max_retries() -> u32 {
    4
}
fn default_endpoint() -> String {
    "https://api.openai.com/v1/chat/completions".into()
}
fn default_key_env() -> String {
    "OPENAI_API_KEY".into()
}
fn default_system() -> String {
    HELPFUL_ASSISTANT.into()
}
fn default_template() -> String {
    "Discuss about {topic}.".into()
}
fn default_follow_up() -> String {
    DEFAULT_FOLLOW_UP.into()
}
fn default_concurrency() -> usize {
    DEFAULT_CONCURRENCY
}
fn default_backoff_ms() -> u64 {
    1000
}
fn default_timeout() -> u64 {
    120
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub model: String,
    #[serde(default = "default_system")]
    pub system_prompt: String,
    #[serde(default = "default_template")]
    pub user_prompt_template: String,
    #[serde(default)]
    pub topics: Vec<String>,
    /// Assistant turns collected per dialogue.
    #[serde(default = "default_turns")]
    pub turns: usize,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_endpoint")]
    pub endpoint_url: String,
    /// Name of the environment variable holding the bearer token.
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_follow_up")]
    pub follow_up: String,
    /// Record source tag; defaults to `gen-<model>`.
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    /// First retry delay; doubles on every further attempt.
    #[serde(default = "default_backoff_ms")]
    pub backoff_base_ms: u64,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

impl GenerationConfig {
    pub fn new(model: impl Into<String>) -> Self {
        GenerationConfig {
            model: model.into(),
            system_prompt: default_system(),
            user_prompt_template: default_template(),
            topics: Vec::new(),
            turns: default_turns(),
            temperature: default_temperature(),
            max_retries: default_max_retries(),
            endpoint_url: default_endpoint(),
            api_key_env: default_key_env(),
            follow_up: default_follow_up(),
            source: None,
            concurrency: default_concurrency(),
            backoff_base_ms: default_backoff_ms(),
            timeout_secs: default_timeout(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, GenError> {
        let cfg: GenerationConfig = toml::from_str(text).map_err(|e| GenError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.model.trim().is_empty() {
            return bad("model must not be empty".into());
        }
        if self.turns == 0 {
            return bad("turns must be at least 1".into());
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature must be >= 0 (got {})", self.temperature));
        }
        if self.concurrency == 0 {
            return bad("concurrency must be at least 1".into());
        }
        if self.user_prompt_template.contains(TOPIC_PLACEHOLDER) && self.topics.is_empty() {
            return bad("user_prompt_template uses {topic} but topics is empty".into());
        }
        Ok(())
    }

    pub fn source_tag(&self) -> String {
        self.source.clone().unwrap_or_else(|| format!("gen-{}", self.model))
    }

    /// The single prompt row described by the config itself.
    pub fn default_row(&self) -> PromptRow {
        PromptRow {
            cell_id: "default".into(),
            system_prompt: self.system_prompt.clone(),
            user_prompt_template: self.user_prompt_template.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptRow {
    pub cell_id: String,
    pub system_prompt: String,
    pub user_prompt_template: String,
}

/// Parse a prompts TSV: `cell_id<TAB>system_prompt<TAB>user_prompt_template`.
/// `#` lines and blank lines are skipped, as is a header row starting with
/// `cell_id`. `\n` and `\t` escapes in prompts are expanded.
pub fn parse_prompts_tsv(text: &str) -> Result<Vec<PromptRow>, GenError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(GenError::Prompts {
                line,
                reason: format!("expected 3 TAB-separated fields, found {}", fields.len()),
            });
        }
        if rows.is_empty() && fields[0] == "cell_id" {
            continue;
        }
        let unescape = |s: &str| s.replace("\\n", "\n").replace("\\t", "\t");
        let row = PromptRow {
            cell_id: fields[0].trim().to_string(),
            system_prompt: unescape(fields[1]),
            user_prompt_template: unescape(fields[2]),
        };
        if row.cell_id.is_empty() || row.user_prompt_template.trim().is_empty() {
            return Err(GenError::Prompts {
                line,
                reason: "cell_id and user_prompt_template are required".into(),
            });
        }
        if rows.iter().any(|r: &PromptRow| r.cell_id == row.cell_id) {
            return Err(GenError::Prompts {
                line,
                reason: format!("duplicate cell_id {:?}", row.cell_id),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// One point of the prompt matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptCell {
    pub cell_id: String,
    pub system_prompt: String,
    pub user_prompt: String,
    pub topic: Option<String>,
}

/// Cross prompt rows with topics. Rows whose template has `{topic}` yield
/// one cell per topic; open-ended rows yield a single cell.
pub fn expand_cells(rows: &[PromptRow], topics: &[String]) -> Result<Vec<PromptCell>, GenError> {
    let mut cells = Vec::new();
    for row in rows {
        if row.user_prompt_template.contains(TOPIC_PLACEHOLDER) {
            if topics.is_empty() {
                return Err(GenError::InvalidConfig(format!(
                    "prompt {:?} uses {{topic}} but topics is empty",
                    row.cell_id
                )));
            }
            for topic in topics {
                cells.push(PromptCell {
                    cell_id: format!("{}/{}", row.cell_id, topic),
                    system_prompt: row.system_prompt.clone(),
                    user_prompt: row.user_prompt_template.replace(TOPIC_PLACEHOLDER, topic),
                    topic: Some(topic.clone()),
                });
            }
        } else {
            cells.push(PromptCell {
                cell_id: row.cell_id.clone(),
                system_prompt: row.system_prompt.clone(),
                user_prompt: row.user_prompt_template.clone(),
                topic: None,
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        ChatMessage {
            role: role.into(),
            content: content.into(),
        }
    }
}

/// Request body of `POST /chat/completions`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
}

/// One completion attempt. Retries are layered on top by the generator.
pub trait ChatTransport: Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError>;
}

/// Pull `choices[0].message.content` out of a response body.
pub fn parse_completion(body: &str) -> Result<String, GenError> {
    let v: Value = serde_json::from_str(body).map_err(|e| GenError::MalformedResponse(format!("not JSON: {e}")))?;
    let content = v
        .get("choices")
        .and_then(Value::as_array)
        .and_then(|c| c.first())
        .and_then(|c| c.get("message"))
        .and_then(|m| m.get("content"))
        .and_then(Value::as_str)
        .ok_or_else(|| GenError::MalformedResponse("no choices[0].message.content".into()))?;
    if content.trim().is_empty() {
        return Err(GenError::MalformedResponse("empty assistant message".into()));
    }
    Ok(content.to_string())
}

/// Blocking HTTP transport with bearer-token auth.
pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: String,
}

impl HttpTransport {
    /// Reads the key from `config.api_key_env`; fails before any request if
    /// it is unset or empty.
    pub fn from_config(config: &GenerationConfig) -> Result<Self, GenError> {
        let api_key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| GenError::AuthMissing {
                var: config.api_key_env.clone(),
            })?;
        Ok(Self::new(
            &config.endpoint_url,
            api_key,
            Duration::from_secs(config.timeout_secs),
        ))
    }

    pub fn new(endpoint: &str, api_key: String, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport {
            agent,
            endpoint: endpoint.to_string(),
            api_key,
        }
    }
}

impl ChatTransport for HttpTransport {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError> {
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(request)
            .map_err(|e| GenError::EndpointUnreachable(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| GenError::MalformedResponse(format!("unreadable body: {e}")))?;
        match status {
            200..=299 => parse_completion(&body),
            429 => Err(GenError::RateLimited { attempts: 1 }),
            _ => Err(GenError::HttpStatus {
                status,
                body: body.chars().take(200).collect(),
            }),
        }
    }
}

type StubFn = dyn Fn(&ChatRequest) -> Result<String, GenError> + Send + Sync;

/// In-process transport for tests and dry runs. Never opens a socket.
pub struct StubTransport {
    reply: Box<StubFn>,
    calls: AtomicUsize,
}

impl StubTransport {
    pub fn new(reply: impl Fn(&ChatRequest) -> Result<String, GenError> + Send + Sync + 'static) -> Self {
        StubTransport {
            reply: Box::new(reply),
            calls: AtomicUsize::new(0),
        }
    }

    /// Deterministic canned replies built from the opening user prompt and
    /// the turn number.
    pub fn canned() -> Self {
        Self::new(|req| {
            let opening = req
                .messages
                .iter()
                .find(|m| m.role == "user")
                .map(|m| m.content.as_str())
                .unwrap_or("");
            let turn = req.messages.iter().filter(|m| m.role == "assistant").count() + 1;
            Ok(format!("Turn {turn}. Responding to: {opening}"))
        })
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatTransport for StubTransport {
    fn complete(&self, request: &ChatRequest) -> Result<String, GenError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.reply)(request)
    }
}

/// Delay before retry number `attempt` (0-based): `base * 2^attempt`, plus
/// up to 25% random jitter.
pub fn backoff_delay(base: Duration, attempt: u32) -> Duration {
    let exp = base.saturating_mul(1u32 << attempt.min(16));
    let jitter = rand::rng().random_range(0.0..0.25);
    exp + exp.mul_f64(jitter)
}

fn complete_with_retries(
    transport: &dyn ChatTransport,
    request: &ChatRequest,
    max_retries: u32,
    base: Duration,
) -> Result<String, GenError> {
    let mut attempt = 0u32;
    loop {
        match transport.complete(request) {
            Ok(text) => return Ok(text),
            Err(e) if e.retryable() && attempt < max_retries => {
                log::debug!("attempt {} failed: {e}; retrying", attempt + 1);
                std::thread::sleep(backoff_delay(base, attempt));
                attempt += 1;
            }
            Err(GenError::RateLimited { .. }) => {
                return Err(GenError::RateLimited { attempts: attempt + 1 });
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationFailure {
    pub cell_id: String,
    pub replica: usize,
    pub record_id: String,
    pub error: GenError,
}

#[derive(Debug, Clone, Default)]
pub struct GenerationOutcome {
    /// Ordered by cell, then replica.
    pub records: Vec<DialogueRecord>,
    pub failures: Vec<GenerationFailure>,
}

fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

type DialogueResult = Result<Vec<String>, GenError>;

fn run_dialogue(transport: &dyn ChatTransport, config: &GenerationConfig, cell: &PromptCell) -> DialogueResult {
    let base = Duration::from_millis(config.backoff_base_ms);
    let mut messages = Vec::with_capacity(2 * config.turns + 1);
    if !cell.system_prompt.is_empty() {
        messages.push(ChatMessage::new("system", cell.system_prompt.clone()));
    }
    messages.push(ChatMessage::new("user", cell.user_prompt.clone()));
    let mut turns = Vec::with_capacity(config.turns);
    for turn in 0..config.turns {
        if turn > 0 {
            messages.push(ChatMessage::new("user", config.follow_up.clone()));
        }
        let request = ChatRequest {
            model: config.model.clone(),
            messages: messages.clone(),
            temperature: config.temperature,
        };
        let reply = complete_with_retries(transport, &request, config.max_retries, base)?;
        if reply.trim().is_empty() {
            return Err(GenError::MalformedResponse("empty assistant message".into()));
        }
        messages.push(ChatMessage::new("assistant", reply.clone()));
        turns.push(reply);
    }
    Ok(turns)
}

/// Generate `count_per_cell` dialogues for every cell. Output order depends
/// only on cell and replica indices, not on completion order.
pub fn generate_dialogues(
    config: &GenerationConfig,
    cells: &[PromptCell],
    count_per_cell: usize,
    transport: &dyn ChatTransport,
) -> Result<GenerationOutcome, GenError> {
    config.validate()?;
    if count_per_cell == 0 {
        return Err(GenError::InvalidConfig("count per cell must be at least 1".into()));
    }
    let source = config.source_tag();
    let system_hashes: BTreeMap<&str, String> = cells
        .iter()
        .map(|c| (c.system_prompt.as_str(), sha256_hex(&c.system_prompt)))
        .collect();

    let total = cells.len() * count_per_cell;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, DialogueResult)>> = Mutex::new(Vec::with_capacity(total));
    let workers = config.concurrency.min(total.max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let slot = next.fetch_add(1, Ordering::SeqCst);
                if slot >= total {
                    break;
                }
                let cell = &cells[slot / count_per_cell];
                let outcome = run_dialogue(transport, config, cell);
                results.lock().expect("result lock").push((slot, outcome));
            });
        }
    });

    let mut results = results.into_inner().expect("result lock");
    results.sort_by_key(|(slot, _)| *slot);

    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let mut outcome = GenerationOutcome::default();
    for (slot, result) in results {
        let cell = &cells[slot / count_per_cell];
        let replica = slot % count_per_cell;
        let id = record_id(&source, slot);
        match result {
            Ok(turns) => {
                let mut rec = DialogueRecord::new(id, Label::Ai, source.clone(), turns.join("\n"));
                let meta = &mut rec.meta;
                meta.insert("model".into(), config.model.clone());
                meta.insert("cell_id".into(), cell.cell_id.clone());
                if let Some(t) = &cell.topic {
                    meta.insert("topic".into(), t.clone());
                }
                meta.insert("user_prompt".into(), cell.user_prompt.clone());
                meta.insert(
                    "system_prompt_sha256".into(),
                    system_hashes[cell.system_prompt.as_str()].clone(),
                );
                meta.insert("replica".into(), replica.to_string());
                meta.insert("turns".into(), config.turns.to_string());
                meta.insert("temperature".into(), config.temperature.to_string());
                meta.insert("timestamp".into(), timestamp.to_string());
                outcome.records.push(rec);
            }
            Err(error) => outcome.failures.push(GenerationFailure {
                cell_id: cell.cell_id.clone(),
                replica,
                record_id: id,
                error,
            }),
        }
    }
    Ok(outcome)
}
