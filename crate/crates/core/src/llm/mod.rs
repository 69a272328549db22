//! Prompt assembly, the chat-completion client and code extraction.

mod client;
mod extract;
mod prompt;

pub use client::{Attempt, Completion, EndpointConfig, LlmClient, KEY_ENV};
pub use extract::{extract_code, ExtractError};
pub use prompt::{build_prompt, PromptMode, PromptTemplate, WorldInfo, PLACEHOLDER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("user prompt is empty")]
    EmptyPrompt,
    #[error("template instruction must contain {{PROMPT}} exactly once, found {0}")]
    Placeholder(usize),
    #[error("no credential: set MOTIONFORGE_LLM_KEY")]
    MissingCredential,
    #[error("endpoint rejected the credential (HTTP {0})")]
    Auth(u16),
    #[error("endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("gave up after {attempts} attempts; last failure: {last}")]
    Exhausted { attempts: u32, last: String },
    #[error("malformed completion response: {0}")]
    Malformed(String),
}
