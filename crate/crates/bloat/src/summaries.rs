//! The summarize stage: reference or remote summaries, bloat, and targeted
//! summaries run on top of them.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use bloat_core::summarizer::{
    compute_bloat, extract_summary_chunked, targeted_summary_stats, AttentionModel, BloatScore, ChunkSummary,
    LengthUnit, Summary, SummarySource,
};
use bloat_core::text::{plan_chunks, words, Document, SentenceSplitter, Tokenizer, WordPieceTokenizer};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SummarizerConfig;
use crate::prompts::PromptSet;
use crate::remote::RemoteClient;
use crate::{Error, Result};

/// One line of `summaries.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub doc_id: String,
    pub source: SummarySource,
    pub unit: LengthUnit,
    pub n: usize,
    pub n_star: usize,
    pub bloat: f64,
    pub text: String,
    pub summary_tokens: usize,
    pub summary_words: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chunk_summaries: Vec<ChunkSummary>,
}

impl SummaryRecord {
    pub fn new(summary: &Summary, score: &BloatScore) -> Self {
        SummaryRecord {
            doc_id: summary.doc_id.clone(),
            source: summary.source.clone(),
            unit: score.unit,
            n: score.n,
            n_star: score.n_star,
            bloat: score.bloat,
            text: summary.summary_text.clone(),
            summary_tokens: summary.summary_tokens,
            summary_words: summary.summary_words,
            chunk_summaries: summary.chunk_summaries.clone(),
        }
    }

    pub fn summary(&self) -> Summary {
        Summary {
            doc_id: self.doc_id.clone(),
            summary_text: self.text.clone(),
            summary_tokens: self.summary_tokens,
            summary_words: self.summary_words,
            source: self.source.clone(),
            chunk_summaries: self.chunk_summaries.clone(),
        }
    }
}

/// One line of `targeted.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetedRecord {
    pub doc_id: String,
    pub template_id: String,
    pub nonempty: bool,
    pub scaled_len: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFailure {
    pub doc_id: String,
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Default)]
pub struct SummarizeOutput {
    pub summaries: Vec<SummaryRecord>,
    pub targeted: Vec<TargetedRecord>,
    pub failures: Vec<SummaryFailure>,
    pub retries: u32,
}

/// The seeded attention model over one document's vocabulary. Rows depend
/// only on the seed and the token, so per-document models agree with a
/// corpus-wide one.
pub fn reference_model(doc: &Document, cfg: &SummarizerConfig, seed: u64) -> Result<AttentionModel> {
    let vocab = WordPieceTokenizer.tokenize(&doc.text).into_iter().map(|t| t.span.slice(&doc.text).to_lowercase());
    Ok(AttentionModel::seeded_with_scale(vocab, cfg.embedding_dim, cfg.key_dim, cfg.value_dim, seed, cfg.weight_scale)?)
}

pub fn reference_summary(doc: &Document, cfg: &SummarizerConfig, max_tokens: usize, seed: u64) -> Result<Summary> {
    let plan = plan_chunks(doc, max_tokens)?;
    let model = reference_model(doc, cfg, seed)?;
    Ok(extract_summary_chunked(doc, &plan, &model, &cfg.utility()?, cfg.granularity)?)
}

/// Keyword stand-in for a targeted prompt: the summary sentences that
/// mention a theme word, or `NA` when none does.
pub fn reference_targeted(summary: &Summary, theme: &[String], splitter: &SentenceSplitter) -> Summary {
    let text = &summary.summary_text;
    let kept: Vec<&str> = splitter
        .split(text, true)
        .iter()
        .map(|s| s.slice(text))
        .filter(|s| words(s).any(|w| theme.iter().any(|t| w.eq_ignore_ascii_case(t))))
        .collect();
    let out = if kept.is_empty() { "NA".to_string() } else { kept.join(" ") };
    Summary::new(summary.doc_id.clone(), out, summary.source.clone())
}

/// How the stage obtains summaries.
pub enum Summarizer<'a> {
    Reference { seed: u64, themes: BTreeMap<String, Vec<String>> },
    Remote { client: &'a RemoteClient, prompts: &'a PromptSet },
}

pub fn run(docs: &[Document], cfg: &SummarizerConfig, max_tokens: usize, how: &Summarizer) -> Result<SummarizeOutput> {
    if let Summarizer::Remote { prompts, .. } = how {
        prompts.get(&cfg.prompt)?;
        for t in &cfg.targeted {
            prompts.get(t)?;
        }
    }
    let results: Vec<(Result<(Summary, u32)>, &Document)> = docs
        .par_iter()
        .map(|doc| {
            let r = match how {
                Summarizer::Reference { seed, .. } => reference_summary(doc, cfg, max_tokens, *seed).map(|s| (s, 0)),
                Summarizer::Remote { client, prompts } => {
                    let plan = plan_chunks(doc, max_tokens);
                    plan.map_err(Error::from)
                        .and_then(|p| client.summarize(doc, &p, prompts.get(&cfg.prompt)?))
                        .map(|r| (r.summary, r.retries))
                }
            };
            (r, doc)
        })
        .collect();
    let mut out = SummarizeOutput::default();
    let mut ok: Vec<(Summary, &Document)> = Vec::new();
    for (r, doc) in results {
        match r.and_then(|(s, retries)| {
            let score = compute_bloat(doc, &s, cfg.unit)?;
            Ok((s, score, retries))
        }) {
            Ok((s, score, retries)) => {
                out.retries += retries;
                out.summaries.push(SummaryRecord::new(&s, &score));
                ok.push((s, doc));
            }
            Err(e) => {
                tracing::warn!(doc_id = %doc.doc_id, "summary failed: {e}");
                out.failures.push(SummaryFailure { doc_id: doc.doc_id.clone(), stage: "summary".into(), error: e.to_string() });
            }
        }
    }
    let splitter = SentenceSplitter::default();
    for template in &cfg.targeted {
        let theme = match how {
            Summarizer::Reference { themes, .. } => match themes.get(template) {
                Some(t) => Some(t),
                None => continue,
            },
            Summarizer::Remote { .. } => None,
        };
        let produced: Vec<(&Summary, Result<(Summary, u32)>)> = ok
            .par_iter()
            .map(|(s, _)| {
                let r = match how {
                    Summarizer::Reference { .. } => Ok((reference_targeted(s, theme.expect("theme present"), &splitter), 0)),
                    Summarizer::Remote { client, prompts } => prompts
                        .get(template)
                        .and_then(|t| client.summarize_text(&s.doc_id, &s.summary_text, t, max_tokens))
                        .map(|r| (r.summary, r.retries)),
                };
                (s, r)
            })
            .collect();
        for (original, r) in produced {
            let r = r.and_then(|(t, retries)| {
                let stats = targeted_summary_stats(std::slice::from_ref(&t), std::slice::from_ref(original), cfg.unit)?;
                Ok((t, stats.into_iter().next().expect("one input, one output"), retries))
            });
            match r {
                Ok((t, stats, retries)) => {
                    out.retries += retries;
                    out.targeted.push(TargetedRecord {
                        doc_id: t.doc_id.clone(),
                        template_id: template.clone(),
                        nonempty: stats.nonempty,
                        scaled_len: stats.scaled_len,
                        text: t.summary_text,
                    });
                }
                Err(e) => {
                    tracing::warn!(doc_id = %original.doc_id, template, "targeted summary failed: {e}");
                    out.failures.push(SummaryFailure {
                        doc_id: original.doc_id.clone(),
                        stage: template.clone(),
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn load_themes(lexicon_dir: &Path, templates: &[String]) -> Result<BTreeMap<String, Vec<String>>> {
    let mut themes = BTreeMap::new();
    for t in templates {
        if let Some(words) = crate::lexicon::load_theme(lexicon_dir, t)? {
            themes.insert(t.clone(), words);
        }
    }
    Ok(themes)
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| Error::Parse { path: path.into(), line: i + 1, message: e.to_string() })?,
        );
    }
    Ok(out)
}
