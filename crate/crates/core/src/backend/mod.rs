//! Decision sources: a chat-completion HTTP client, a replay script, and
//! closures for tests. Scripted game policies live in [`scripted`].

pub mod http;
pub mod scripted;

use std::collections::VecDeque;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::{HttpBackend, HttpConfig, RetryPolicy, API_KEY_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    /// Wall-clock seconds for HTTP backends; zero for local ones so reports stay reproducible.
    pub latency: f64,
    pub attempts: u32,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl Completion {
    pub fn local(text: impl Into<String>) -> Self {
        Completion {
            text: text.into(),
            latency: 0.0,
            attempts: 1,
            prompt_tokens: None,
            completion_tokens: None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BackendError {
    #[error("backend failed after {attempts} attempt(s): {message}")]
    Failure { attempts: u32, message: String },
    #[error("replay script exhausted")]
    ReplayExhausted,
    #[error("empty message list")]
    EmptyMessages,
    #[error("invalid backend spec: {0}")]
    InvalidSpec(String),
}

/// Anything that turns a chat transcript into a reply. Must tolerate concurrent calls.
pub trait Backend: Send + Sync {
    fn name(&self) -> String;

    fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, BackendError>;
}

pub type BackendRef = Arc<dyn Backend>;

/// Pops scripted replies in order.
pub struct ReplayBackend {
    name: String,
    replies: Mutex<VecDeque<String>>,
}

impl ReplayBackend {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ReplayBackend {
            name: "replay".to_string(),
            replies: Mutex::new(replies.into_iter().map(Into::into).collect()),
        }
    }

    /// Replies separated by lines containing only `---`.
    pub fn parse_script(text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            if line.trim() == "---" {
                out.push(current.join("\n").trim().to_string());
                current.clear();
            } else {
                current.push(line);
            }
        }
        let last = current.join("\n").trim().to_string();
        if !last.is_empty() {
            out.push(last);
        }
        out
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut r = ReplayBackend::new(Self::parse_script(&text));
        r.name = format!("replay:{}", path.display());
        Ok(r)
    }

    pub fn remaining(&self) -> usize {
        self.replies.lock().expect("replay lock").len()
    }
}

impl Backend for ReplayBackend {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, BackendError> {
        if messages.is_empty() {
            return Err(BackendError::EmptyMessages);
        }
        let text = self
            .replies
            .lock()
            .expect("replay lock")
            .pop_front()
            .ok_or(BackendError::ReplayExhausted)?;
        Ok(Completion::local(text))
    }
}

type ReplyFn = dyn Fn(&[ChatMessage]) -> Result<String, BackendError> + Send + Sync;

/// Replies computed by a closure; handy for mocks that look at the prompt.
pub struct FnBackend {
    name: String,
    f: Box<ReplyFn>,
}

impl FnBackend {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[ChatMessage]) -> Result<String, BackendError> + Send + Sync + 'static,
    {
        FnBackend {
            name: name.into(),
            f: Box::new(f),
        }
    }
}

impl Backend for FnBackend {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, BackendError> {
        if messages.is_empty() {
            return Err(BackendError::EmptyMessages);
        }
        (self.f)(messages).map(Completion::local)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_pops_then_exhausts() {
        let r = ReplayBackend::new(["Action: wait."]);
        let msgs = [ChatMessage::user("hi")];
        assert_eq!(r.complete(&msgs).unwrap().text, "Action: wait.");
        assert_eq!(r.complete(&msgs), Err(BackendError::ReplayExhausted));
    }

    #[test]
    fn replay_rejects_empty_messages() {
        let r = ReplayBackend::new(["x"]);
        assert_eq!(r.complete(&[]), Err(BackendError::EmptyMessages));
        assert_eq!(r.remaining(), 1);
    }

    #[test]
    fn script_files_split_on_dashes() {
        let text = "Explanation: first\nAction: wait.\n---\nAction: move away.\n---\n";
        assert_eq!(
            ReplayBackend::parse_script(text),
            vec!["Explanation: first\nAction: wait.", "Action: move away."]
        );
    }
}
