use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    /// Worth retrying: connection failures, rate limits, server errors.
    #[error("transient provider failure: {0}")]
    Transient(String),
    #[error("provider failure: {0}")]
    Permanent(String),
}

impl ProviderError {
    pub fn is_transient(&self) -> bool {
        matches!(self, ProviderError::Transient(_))
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid provider configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: u32,
    pub seed: Option<u64>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 0.0,
            max_tokens: 1024,
            seed: None,
        }
    }
}

/// A text-completion backend. Implementations must be shareable across the
/// augmentation worker threads.
pub trait GenerationProvider: Send + Sync {
    fn complete(&self, prompt: &str, params: &GenerationParams) -> Result<String, ProviderError>;
}

/// Lowercase hex SHA-256 of the prompt: the key under which canned responses
/// are stored.
pub fn prompt_key(prompt: &str) -> String {
    let digest = Sha256::digest(prompt.as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Replays responses from a JSON object mapping [`prompt_key`] to completion
/// text. Unknown prompts fail permanently.
#[derive(Debug, Clone, Default)]
pub struct MockProvider {
    responses: HashMap<String, String>,
}

impl MockProvider {
    pub fn new(responses: HashMap<String, String>) -> Self {
        MockProvider { responses }
    }

    /// Keys each response by the hash of its prompt.
    pub fn from_prompts<I, P, R>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (P, R)>,
        P: AsRef<str>,
        R: Into<String>,
    {
        MockProvider {
            responses: pairs
                .into_iter()
                .map(|(p, r)| (prompt_key(p.as_ref()), r.into()))
                .collect(),
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let read_err = |message: String| ConfigError::Read {
            path: path.display().to_string(),
            message,
        };
        let text = fs::read_to_string(path).map_err(|e| read_err(e.to_string()))?;
        let responses = serde_json::from_str(&text).map_err(|e| read_err(e.to_string()))?;
        Ok(MockProvider { responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl GenerationProvider for MockProvider {
    fn complete(&self, prompt: &str, _params: &GenerationParams) -> Result<String, ProviderError> {
        let key = prompt_key(prompt);
        self.responses
            .get(&key)
            .cloned()
            .ok_or_else(|| ProviderError::Permanent(format!("no canned response for prompt {key}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    /// Attempts after the first one.
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_backoff_ms: 500,
            max_backoff_ms: 8_000,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (0-based), doubling up to the cap.
    pub fn backoff_ms(&self, attempt: u32) -> u64 {
        let factor = 1u64.checked_shl(attempt).unwrap_or(u64::MAX);
        self.initial_backoff_ms.saturating_mul(factor).min(self.max_backoff_ms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Http,
    Mock,
}

/// Provider settings, read from TOML:
///
/// ```toml
/// provider = "http"
/// endpoint = "https://api.example.com/v1/chat/completions"
/// token_env = "SCATE_API_TOKEN"
/// model = "some-model"
/// temperature = 0.0
/// max_tokens = 1024
///
/// [retry]
/// max_retries = 3
/// initial_backoff_ms = 500
/// max_backoff_ms = 8000
/// ```
///
/// A mock provider instead names a `fixture` file, resolved relative to the
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub provider: ProviderKind,
    pub endpoint: Option<String>,
    pub token_env: Option<String>,
    pub model: Option<String>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    pub fixture: Option<PathBuf>,
    #[serde(default)]
    pub retry: RetryPolicy,
}

fn default_max_tokens() -> u32 {
    1024
}

fn default_timeout_secs() -> u64 {
    120
}

impl ProviderConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ProviderConfig = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        match cfg.provider {
            ProviderKind::Http if cfg.endpoint.is_none() || cfg.model.is_none() => Err(ConfigError::Invalid(
                "http provider needs `endpoint` and `model`".into(),
            )),
            ProviderKind::Mock if cfg.fixture.is_none() => {
                Err(ConfigError::Invalid("mock provider needs `fixture`".into()))
            }
            _ => Ok(cfg),
        }
    }

    /// Loads a config file; a relative `fixture` path is resolved against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(fixture), Some(dir)) = (&cfg.fixture, path.parent()) {
            if fixture.is_relative() {
                cfg.fixture = Some(dir.join(fixture));
            }
        }
        Ok(cfg)
    }

    pub fn params(&self, seed: Option<u64>) -> GenerationParams {
        GenerationParams {
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            seed,
        }
    }

    pub fn build(&self) -> Result<Box<dyn GenerationProvider>, ConfigError> {
        match self.provider {
            ProviderKind::Mock => {
                let fixture = self.fixture.as_ref().expect("validated on load");
                Ok(Box::new(MockProvider::from_path(fixture)?))
            }
            #[cfg(feature = "http")]
            ProviderKind::Http => Ok(Box::new(super::http::HttpProvider::from_config(self)?)),
            #[cfg(not(feature = "http"))]
            ProviderKind::Http => Err(ConfigError::Invalid("built without the `http` feature".into())),
        }
    }
}
