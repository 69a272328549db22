use std::fs;
use std::path::PathBuf;
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::LlmError;

pub const KEY_ENV: &str = "MOTIONFORGE_LLM_KEY";
const REDACTED: &str = "[REDACTED]";

/// Chat-completion endpoint settings. The credential is never part of this
/// struct; it comes from `MOTIONFORGE_LLM_KEY` at client construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    /// Base URL; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles after each further failure.
    pub backoff_ms: u64,
    pub timeout_secs: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4".into(),
            temperature: 0.0,
            max_attempts: 3,
            backoff_ms: 1000,
            timeout_secs: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub status: Option<u16>,
    pub error: Option<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub attempts: Vec<Attempt>,
}

pub struct LlmClient {
    config: EndpointConfig,
    key: String,
    agent: ureq::Agent,
    log_dir: Option<PathBuf>,
}

impl std::fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmClient").field("config", &self.config).field("key", &REDACTED).finish()
    }
}

enum Outcome {
    Done(String),
    Retry(String),
    Fatal(LlmError),
}

impl LlmClient {
    /// Read the credential from the environment.
    pub fn from_env(config: EndpointConfig) -> Result<Self, LlmError> {
        match std::env::var(KEY_ENV) {
            Ok(key) if !key.is_empty() => Ok(Self::with_key(config, key)),
            _ => Err(LlmError::MissingCredential),
        }
    }

    pub fn with_key(config: EndpointConfig, key: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(config.timeout_secs.max(1))))
            .build()
            .new_agent();
        Self { config, key: key.into(), agent, log_dir: None }
    }

    /// Log redacted request and response bodies into `dir`.
    pub fn log_to(mut self, dir: impl Into<PathBuf>) -> Self {
        self.log_dir = Some(dir.into());
        self
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn redact(&self, text: &str) -> String {
        if self.key.is_empty() {
            text.to_string()
        } else {
            text.replace(&self.key, REDACTED)
        }
    }

    fn log(&self, name: &str, content: &str) {
        if let Some(dir) = &self.log_dir {
            let write = fs::create_dir_all(dir).and_then(|_| fs::write(dir.join(name), self.redact(content)));
            if let Err(e) = write {
                warn!("cannot write llm log {name}: {e}");
            }
        }
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    /// Send `prompt` as a single user message and return the reply text.
    /// Transport failures, 429 and 5xx are retried with exponential backoff;
    /// 401/403 fail at once.
    pub fn request_completion(&self, prompt: &str) -> Result<Completion, LlmError> {
        let body = json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        let body = serde_json::to_string_pretty(&body).expect("request body serializes");
        let request_log = json!({
            "url": self.url(),
            "headers": {"authorization": format!("Bearer {REDACTED}"), "content-type": "application/json"},
            "body": serde_json::from_str::<Value>(&body).expect("just serialized"),
        });
        self.log("llm_request.json", &serde_json::to_string_pretty(&request_log).expect("log serializes"));

        let attempts_allowed = self.config.max_attempts.max(1);
        let mut attempts = Vec::new();
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        loop {
            let n = attempts.len() + 1;
            let started = Instant::now();
            let (status, outcome) = self.attempt(&body, n);
            let elapsed_ms = started.elapsed().as_millis() as u64;
            let error = match &outcome {
                Outcome::Done(_) => None,
                Outcome::Retry(e) => Some(e.clone()),
                Outcome::Fatal(e) => Some(e.to_string()),
            };
            attempts.push(Attempt { status, error: error.map(|e| self.redact(&e)), elapsed_ms });
            match outcome {
                Outcome::Done(text) => return Ok(Completion { text, attempts }),
                Outcome::Fatal(e) => return Err(e),
                Outcome::Retry(reason) if n as u32 >= attempts_allowed => {
                    return Err(LlmError::Exhausted { attempts: n as u32, last: self.redact(&reason) });
                }
                Outcome::Retry(reason) => {
                    debug!("llm attempt {n} failed ({}); retrying in {delay:?}", self.redact(&reason));
                    thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
    }

    fn attempt(&self, body: &str, n: usize) -> (Option<u16>, Outcome) {
        let result = self
            .agent
            .post(&self.url())
            .header("Authorization", &format!("Bearer {}", self.key))
            .header("Content-Type", "application/json")
            .send(body);
        let mut response = match result {
            Ok(r) => r,
            Err(e) => return (None, Outcome::Retry(format!("transport error: {e}"))),
        };
        let status = response.status().as_u16();
        let text = match response.body_mut().read_to_string() {
            Ok(t) => t,
            Err(e) => return (Some(status), Outcome::Retry(format!("reading response: {e}"))),
        };
        self.log(&format!("llm_response_{n}.json"), &text);
        let outcome = match status {
            200..=299 => match parse_reply(&text) {
                Some(content) => Outcome::Done(content),
                None => Outcome::Fatal(LlmError::Malformed(truncate(&self.redact(&text), 200))),
            },
            401 | 403 => Outcome::Fatal(LlmError::Auth(status)),
            429 | 500..=599 => Outcome::Retry(format!("HTTP {status}")),
            _ => Outcome::Fatal(LlmError::Http { status, body: truncate(&self.redact(&text), 200) }),
        };
        (Some(status), outcome)
    }
}

fn parse_reply(text: &str) -> Option<String> {
    let v: Value = serde_json::from_str(text).ok()?;
    v.get("choices")?.get(0)?.get("message")?.get("content")?.as_str().map(str::to_string)
}

fn truncate(s: &str, n: usize) -> String {
    match s.char_indices().nth(n) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}
