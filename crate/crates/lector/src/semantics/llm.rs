//! LLM-backed similarity provider.
//!
//! Transport is a trait so the retry, backoff, bounded-concurrency and
//! re-prompt logic can be exercised without a network. The HTTP transport
//! POSTs `{"model", "prompt"}` and expects `{"text"}` back.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{LectorError, Result};
use crate::semantics::prompt::{construct_prompt, parse_similarity_response, PromptSpec};
use crate::semantics::{ProviderTag, SimilarityProvider};
use crate::types::Concept;

pub const ENV_ENDPOINT: &str = "LECTOR_LLM_ENDPOINT";
pub const ENV_MODEL: &str = "LECTOR_LLM_MODEL";
pub const ENV_KEY: &str = "LECTOR_LLM_KEY";
pub const ENV_TIMEOUT_SECS: &str = "LECTOR_LLM_TIMEOUT_SECS";
pub const ENV_RETRIES: &str = "LECTOR_LLM_RETRIES";
pub const ENV_CONCURRENCY: &str = "LECTOR_LLM_CONCURRENCY";

/// Out-of-range replies are re-prompted this many times before erroring.
const MAX_REPROMPTS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlmSettings {
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    /// Additional transport attempts after the first failure.
    pub retries: u32,
    pub max_concurrency: usize,
    /// First backoff delay; doubles per retry.
    pub backoff_base: Duration,
}

impl LlmSettings {
    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var(ENV_ENDPOINT)
            .map_err(|_| LectorError::Config(format!("{ENV_ENDPOINT} is not set")))?;
        let model = std::env::var(ENV_MODEL)
            .map_err(|_| LectorError::Config(format!("{ENV_MODEL} is not set")))?;
        let api_key = std::env::var(ENV_KEY).ok();
        let timeout_secs: u64 = parse_env_or(ENV_TIMEOUT_SECS, 30)?;
        let retries: u32 = parse_env_or(ENV_RETRIES, 3)?;
        let max_concurrency: usize = parse_env_or(ENV_CONCURRENCY, 4)?;
        Ok(Self {
            endpoint,
            model,
            api_key,
            timeout: Duration::from_secs(timeout_secs),
            retries,
            max_concurrency,
            backoff_base: Duration::from_millis(500),
        })
    }
}

fn parse_env_or<T: std::str::FromStr>(name: &str, default: T) -> Result<T> {
    match std::env::var(name) {
        Ok(raw) => raw
            .parse()
            .map_err(|_| LectorError::Config(format!("{name} has invalid value {raw:?}"))),
        Err(_) => Ok(default),
    }
}

pub trait LlmTransport: Send + Sync {
    fn complete(&self, model: &str, prompt: &str) -> Result<String>;
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
}

#[derive(Deserialize)]
struct CompletionResponse {
    text: String,
}

pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(endpoint: String, api_key: Option<String>, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build();
        Self {
            agent: config.into(),
            endpoint,
            api_key,
        }
    }
}

impl LlmTransport for HttpTransport {
    fn complete(&self, model: &str, prompt: &str) -> Result<String> {
        let mut request = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            request = request.header("authorization", &format!("Bearer {key}"));
        }
        let mut response = request
            .send_json(CompletionRequest { model, prompt })
            .map_err(|e| LectorError::Transport(e.to_string()))?;
        let body: CompletionResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| LectorError::Transport(format!("malformed response body: {e}")))?;
        Ok(body.text)
    }
}

/// Counting semaphore bounding concurrent outstanding requests.
struct Limiter {
    permits: Mutex<usize>,
    freed: Condvar,
}

impl Limiter {
    fn new(permits: usize) -> Self {
        Self {
            permits: Mutex::new(permits.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> LimiterGuard<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.freed.wait(permits).unwrap();
        }
        *permits -= 1;
        LimiterGuard { limiter: self }
    }
}

struct LimiterGuard<'a> {
    limiter: &'a Limiter,
}

impl Drop for LimiterGuard<'_> {
    fn drop(&mut self) {
        *self.limiter.permits.lock().unwrap() += 1;
        self.limiter.freed.notify_one();
    }
}

pub struct LlmProvider<T: LlmTransport> {
    transport: T,
    model: String,
    retries: u32,
    backoff_base: Duration,
    prompt_spec: PromptSpec,
    limiter: Limiter,
}

impl LlmProvider<HttpTransport> {
    pub fn from_settings(settings: &LlmSettings) -> Self {
        let transport = HttpTransport::new(
            settings.endpoint.clone(),
            settings.api_key.clone(),
            settings.timeout,
        );
        Self::new(transport, settings)
    }
}

impl<T: LlmTransport> LlmProvider<T> {
    pub fn new(transport: T, settings: &LlmSettings) -> Self {
        Self {
            transport,
            model: settings.model.clone(),
            retries: settings.retries,
            backoff_base: settings.backoff_base,
            prompt_spec: PromptSpec::default(),
            limiter: Limiter::new(settings.max_concurrency),
        }
    }

    pub fn with_prompt_spec(mut self, spec: PromptSpec) -> Self {
        self.prompt_spec = spec;
        self
    }

    fn complete_with_retries(&self, prompt: &str) -> Result<String> {
        let mut last = None;
        for attempt in 0..=self.retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff_base * 2u32.pow(attempt - 1));
            }
            match self.transport.complete(&self.model, prompt) {
                Ok(text) => return Ok(text),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt was made"))
    }
}

impl<T: LlmTransport> SimilarityProvider for LlmProvider<T> {
    fn provider_id(&self) -> String {
        "llm".to_owned()
    }

    fn model_id(&self) -> String {
        self.model.clone()
    }

    fn tag(&self) -> ProviderTag {
        ProviderTag::Llm
    }

    fn score(&self, a: &Concept, b: &Concept) -> Result<f64> {
        let _permit = self.limiter.acquire();
        let prompt = construct_prompt(a, b, &self.prompt_spec)?;
        let mut last = None;
        for _ in 0..=MAX_REPROMPTS {
            let raw = self.complete_with_retries(&prompt)?;
            match parse_similarity_response(&raw) {
                Ok(value) => return Ok(value),
                Err(e @ LectorError::OutOfRange { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("loop ran at least once"))
    }
}
