//! Chat-completion client for OpenAI-compatible JSON endpoints.

use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::provider::{ConfigError, GenerationParams, GenerationProvider, ProviderConfig, ProviderError, RetryPolicy};

pub struct HttpProvider {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    token: Option<String>,
    retry: RetryPolicy,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, token: Option<String>, retry: RetryPolicy) -> Self {
        Self::with_timeout(endpoint, model, token, retry, Duration::from_secs(120))
    }

    fn with_timeout(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        token: Option<String>,
        retry: RetryPolicy,
        timeout: Duration,
    ) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpProvider {
            agent,
            endpoint: endpoint.into(),
            model: model.into(),
            token,
            retry,
        }
    }

    /// The auth token is read from the environment variable named by
    /// `token_env`; it must be set when named.
    pub fn from_config(cfg: &ProviderConfig) -> Result<Self, ConfigError> {
        let (Some(endpoint), Some(model)) = (&cfg.endpoint, &cfg.model) else {
            return Err(ConfigError::Invalid("http provider needs `endpoint` and `model`".into()));
        };
        let token = match &cfg.token_env {
            Some(var) => Some(
                std::env::var(var)
                    .map_err(|_| ConfigError::Invalid(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        Ok(Self::with_timeout(
            endpoint.clone(),
            model.clone(),
            token,
            cfg.retry,
            Duration::from_secs(cfg.timeout_secs),
        ))
    }

    fn request_body(&self, prompt: &str, params: &GenerationParams) -> Value {
        let mut body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        });
        if let Some(seed) = params.seed {
            body["seed"] = json!(seed);
        }
        body
    }

    fn attempt(&self, body: &str) -> Result<String, ProviderError> {
        let mut req = self.agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(token) = &self.token {
            req = req.header("Authorization", format!("Bearer {token}"));
        }
        let mut resp = req.send(body).map_err(classify)?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string();
        match status {
            200..=299 => {
                let text = text.map_err(|e| ProviderError::Permanent(format!("reading response body: {e}")))?;
                extract_content(&text)
            }
            429 | 500..=599 => Err(ProviderError::Transient(format!("HTTP {status}"))),
            _ => Err(ProviderError::Permanent(format!(
                "HTTP {status}: {}",
                text.unwrap_or_default().chars().take(200).collect::<String>()
            ))),
        }
    }
}

fn classify(e: ureq::Error) -> ProviderError {
    match e {
        ureq::Error::Io(_)
        | ureq::Error::Timeout(_)
        | ureq::Error::HostNotFound
        | ureq::Error::ConnectionFailed
        | ureq::Error::Protocol(_)
        | ureq::Error::BodyStalled => ProviderError::Transient(e.to_string()),
        other => ProviderError::Permanent(other.to_string()),
    }
}

/// `choices[0].message.content` of a chat-completion response.
fn extract_content(text: &str) -> Result<String, ProviderError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| ProviderError::Permanent(format!("malformed response: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| ProviderError::Permanent("response has no choices[0].message.content".into()))
}

impl GenerationProvider for HttpProvider {
    fn complete(&self, prompt: &str, params: &GenerationParams) -> Result<String, ProviderError> {
        let body = self.request_body(prompt, params).to_string();
        let mut attempt = 0;
        loop {
            match self.attempt(&body) {
                Err(e) if e.is_transient() && attempt < self.retry.max_retries => {
                    let delay = self.retry.backoff_ms(attempt);
                    log::warn!("{e}; retrying in {delay} ms");
                    thread::sleep(Duration::from_millis(delay));
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}
