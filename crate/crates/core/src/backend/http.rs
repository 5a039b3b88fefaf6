//! Blocking client for the common chat-completion wire shape.
//!
//! Request: `POST {endpoint}/chat/completions` with
//! `{"model": "...", "messages": [{"role": "user", "content": "..."}], "temperature": 0.0}`.
//! Response: the first choice's `message.content`; `usage.prompt_tokens` and
//! `usage.completion_tokens` are logged when present.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Backend, BackendError, ChatMessage, Completion};

/// Bearer token for the chat endpoint, read when a config has no explicit key.
pub const API_KEY_ENV: &str = "COORD_ARENA_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            factor: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Pause before attempt `attempt + 1`, counting attempts from 1.
    pub fn delay_after(&self, attempt: u32) -> Duration {
        self.base_delay
            .mul_f64(self.factor.powi(attempt.saturating_sub(1) as i32))
    }

    /// Upper bound on time spent sleeping between attempts.
    pub fn total_backoff(&self) -> Duration {
        (1..self.max_attempts).map(|a| self.delay_after(a)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout: Duration,
    pub retry: RetryPolicy,
    pub api_key: Option<String>,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 0.0,
            timeout: Duration::from_secs(60),
            retry: RetryPolicy::default(),
            api_key: None,
        }
    }

    pub fn url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        if config.endpoint.is_empty() || config.model.is_empty() {
            return Err(BackendError::InvalidSpec(
                "http backend needs an endpoint and a model".into(),
            ));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::InvalidSpec(e.to_string()))?;
        let api_key = config
            .api_key
            .clone()
            .or_else(|| std::env::var(API_KEY_ENV).ok());
        Ok(HttpBackend {
            config,
            client,
            api_key,
        })
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    fn attempt(&self, body: &serde_json::Value) -> Result<Completion, AttemptError> {
        let mut req = self.client.post(self.config.url()).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| {
            let retry = e.is_timeout() || e.is_connect() || e.is_request();
            AttemptError {
                retry,
                message: e.to_string(),
            }
        })?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(AttemptError {
                retry: status.as_u16() == 429 || status.is_server_error(),
                message: format!(
                    "status {status}: {}",
                    text.chars().take(200).collect::<String>()
                ),
            });
        }
        let value: serde_json::Value = resp.json().map_err(|e| AttemptError {
            retry: e.is_timeout(),
            message: format!("bad response body: {e}"),
        })?;
        let text = value["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| AttemptError {
                retry: false,
                message: "response has no choices[0].message.content".into(),
            })?
            .to_string();
        Ok(Completion {
            text,
            latency: 0.0,
            attempts: 0,
            prompt_tokens: value["usage"]["prompt_tokens"].as_u64(),
            completion_tokens: value["usage"]["completion_tokens"].as_u64(),
        })
    }
}

struct AttemptError {
    retry: bool,
    message: String,
}

impl Backend for HttpBackend {
    fn name(&self) -> String {
        format!("http:{}", self.config.model)
    }

    fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, BackendError> {
        if messages.is_empty() {
            return Err(BackendError::EmptyMessages);
        }
        let body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        });
        let started = Instant::now();
        let max = self.config.retry.max_attempts.max(1);
        let mut attempt = 1;
        loop {
            match self.attempt(&body) {
                Ok(mut c) => {
                    c.attempts = attempt;
                    c.latency = started.elapsed().as_secs_f64();
                    tracing::info!(
                        backend = %self.name(),
                        latency = c.latency,
                        attempts = c.attempts,
                        prompt_tokens = c.prompt_tokens,
                        completion_tokens = c.completion_tokens,
                        "chat completion"
                    );
                    return Ok(c);
                }
                Err(e) if e.retry && attempt < max => {
                    let wait = self.config.retry.delay_after(attempt);
                    tracing::warn!(backend = %self.name(), attempt, error = %e.message, ?wait, "retrying");
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                Err(e) => {
                    tracing::error!(backend = %self.name(), attempt, error = %e.message, "chat completion failed");
                    return Err(BackendError::Failure {
                        attempts: attempt,
                        message: e.message,
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_from_one_second() {
        let r = RetryPolicy::default();
        assert_eq!(r.delay_after(1), Duration::from_secs(1));
        assert_eq!(r.delay_after(2), Duration::from_secs(2));
        assert_eq!(r.delay_after(4), Duration::from_secs(8));
        assert_eq!(r.total_backoff(), Duration::from_secs(15));
    }

    #[test]
    fn url_appends_route_once() {
        assert_eq!(
            HttpConfig::new("http://h/v1/", "m").url(),
            "http://h/v1/chat/completions"
        );
        assert_eq!(
            HttpConfig::new("http://h/v1/chat/completions", "m").url(),
            "http://h/v1/chat/completions"
        );
    }

    #[test]
    fn missing_model_is_rejected() {
        assert!(HttpBackend::new(HttpConfig::new("http://h", "")).is_err());
    }
}
