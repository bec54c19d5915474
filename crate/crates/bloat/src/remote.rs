//! Chat-completion client for remote summaries.
//!
//! Each chunk of a document becomes one user-role request. Requests run on
//! scoped worker threads, capped by a semaphore shared across every document
//! using the same client, and responses are reassembled by chunk index.

use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use bloat_core::summarizer::{ChunkSummary, Summary, SummarySource};
use bloat_core::text::{plan_chunks, ChunkPlan, Document, DocumentKind, Segmenter};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::prompts::PromptTemplate;
use crate::{Error, Result};

pub const API_KEY_ENV: &str = "API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    /// First backoff delay; doubles on each retry up to `max_backoff_ms`.
    pub backoff_ms: u64,
    pub max_backoff_ms: u64,
    /// Requests in flight at once across all documents.
    pub concurrency: usize,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo".into(),
            timeout_secs: 120,
            max_retries: 5,
            backoff_ms: 1000,
            max_backoff_ms: 30_000,
            concurrency: 4,
        }
    }
}

struct Semaphore {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(n: usize) -> Self {
        Semaphore { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Semaphore);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

/// One completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    /// The body or the message content was empty.
    pub empty: bool,
    pub retries: u32,
}

/// A remote summary plus the retries it took.
#[derive(Debug, Clone, PartialEq)]
pub struct RemoteSummary {
    pub summary: Summary,
    pub retries: u32,
}

pub struct RemoteClient {
    agent: ureq::Agent,
    cfg: RemoteConfig,
    api_key: String,
    permits: Semaphore,
    total_retries: AtomicU32,
}

impl RemoteClient {
    pub fn new(cfg: RemoteConfig, api_key: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let permits = Semaphore::new(cfg.concurrency);
        RemoteClient { agent, cfg, api_key: api_key.into(), permits, total_retries: AtomicU32::new(0) }
    }

    /// Reads the key from `API_KEY`; a missing or empty key is a
    /// configuration error.
    pub fn from_env(cfg: RemoteConfig) -> Result<Self> {
        match std::env::var(API_KEY_ENV) {
            Ok(k) if !k.trim().is_empty() => Ok(Self::new(cfg, k.trim())),
            _ => Err(Error::Config(format!("remote mode needs the {API_KEY_ENV} environment variable"))),
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.cfg
    }

    /// Retries performed by this client so far.
    pub fn total_retries(&self) -> u32 {
        self.total_retries.load(Ordering::Relaxed)
    }

    fn backoff(&self, attempt: u32, retry_after: Option<u64>) -> Duration {
        let exp = self.cfg.backoff_ms.saturating_mul(1u64 << attempt.min(20));
        let ms = retry_after.map_or(exp, |s| s.saturating_mul(1000).max(exp)).min(self.cfg.max_backoff_ms);
        Duration::from_millis(ms)
    }

    /// Sends one prompt, retrying rate limits, server errors and transport
    /// failures with exponential backoff.
    pub fn complete(&self, prompt: &str, template: &PromptTemplate) -> Result<Completion> {
        let p = &template.params;
        let mut body = json!({
            "model": self.cfg.model,
            "messages": [{ "role": "user", "content": prompt }],
            "temperature": p.temperature,
            "top_p": p.top_p,
            "presence_penalty": p.presence_penalty,
            "frequency_penalty": p.frequency_penalty,
        });
        if let Some(m) = p.max_tokens {
            body["max_tokens"] = json!(m);
        }
        let mut retries = 0u32;
        loop {
            let _permit = self.permits.acquire();
            let outcome = self
                .agent
                .post(&self.cfg.endpoint)
                .header("Authorization", &format!("Bearer {}", self.api_key))
                .send_json(&body);
            drop(_permit);
            let (status, retry_after, text) = match outcome {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    let retry_after = resp
                        .headers()
                        .get("retry-after")
                        .and_then(|v| v.to_str().ok())
                        .and_then(|s| s.trim().parse::<u64>().ok());
                    let text = resp.body_mut().read_to_string().map_err(|e| Error::Http(e.to_string()))?;
                    (Some(status), retry_after, text)
                }
                Err(e) => {
                    tracing::warn!(retry = retries + 1, "transport error: {e}");
                    (None, None, e.to_string())
                }
            };
            match status {
                Some(200..=299) => {
                    return parse_completion(&text).map(|(text, empty)| Completion { text, empty, retries });
                }
                Some(s @ (401 | 403)) => return Err(Error::Auth(s)),
                Some(s) if s != 429 && s < 500 => return Err(Error::Http(format!("HTTP {s}: {}", text.trim()))),
                _ => {}
            }
            if retries >= self.cfg.max_retries {
                return Err(match status {
                    Some(429) => Error::RateLimited(retries),
                    Some(s) => Error::Http(format!("HTTP {s} after {retries} retries")),
                    None => Error::Http(format!("{text} (after {retries} retries)")),
                });
            }
            let delay = self.backoff(retries, retry_after);
            retries += 1;
            self.total_retries.fetch_add(1, Ordering::Relaxed);
            tracing::warn!(retry = retries, status = ?status, delay_ms = delay.as_millis() as u64, "retrying request");
            thread::sleep(delay);
        }
    }

    /// Summarizes every chunk of `plan` and joins the responses with a
    /// newline, in chunk order.
    pub fn summarize(&self, doc: &Document, plan: &ChunkPlan, template: &PromptTemplate) -> Result<RemoteSummary> {
        template.validate()?;
        let n = plan.len();
        let next = AtomicUsize::new(0);
        let results: Vec<Mutex<Option<Result<Completion>>>> = (0..n).map(|_| Mutex::new(None)).collect();
        thread::scope(|s| {
            for _ in 0..self.cfg.concurrency.clamp(1, n.max(1)) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let prompt = template.render(plan.chunk_text(doc, i));
                    *results[i].lock().unwrap() = Some(self.complete(&prompt, template));
                });
            }
        });
        let mut chunks = Vec::with_capacity(n);
        let mut retries = 0;
        for (index, slot) in results.into_iter().enumerate() {
            let c = slot.into_inner().unwrap().expect("every chunk was attempted")?;
            retries += c.retries;
            chunks.push(ChunkSummary { index, text: c.text, empty_chunk: c.empty });
        }
        let source = SummarySource::Remote {
            model: self.cfg.model.clone(),
            temperature: template.params.temperature,
            prompt_id: template.template_id.clone(),
        };
        Ok(RemoteSummary { summary: Summary::from_chunks(doc.doc_id.clone(), chunks, source), retries })
    }

    /// Chunks and summarizes free text, such as an earlier summary that a
    /// targeted prompt runs on.
    pub fn summarize_text(
        &self,
        doc_id: &str,
        text: &str,
        template: &PromptTemplate,
        max_tokens: usize,
    ) -> Result<RemoteSummary> {
        let doc = Document::new(doc_id, "", "", DocumentKind::Mdna, text, &Segmenter::default());
        let plan = plan_chunks(&doc, max_tokens)?;
        self.summarize(&doc, &plan, template)
    }
}

/// Message content of the first choice. An empty body or content is an
/// empty chunk; a finish reason other than `stop` is a truncation.
fn parse_completion(body: &str) -> Result<(String, bool)> {
    if body.trim().is_empty() {
        return Ok((String::new(), true));
    }
    let v: Value = serde_json::from_str(body)?;
    let choice = v.get("choices").and_then(|c| c.get(0));
    let reason = choice.and_then(|c| c.get("finish_reason")).and_then(Value::as_str);
    if let Some(r) = reason {
        if r != "stop" {
            return Err(Error::TruncatedResponse(r.to_string()));
        }
    }
    let text = choice
        .and_then(|c| c.get("message"))
        .and_then(|m| m.get("content"))
        .and_then(Value::as_str)
        .unwrap_or("")
        .trim()
        .to_string();
    let empty = text.is_empty();
    Ok((text, empty))
}
