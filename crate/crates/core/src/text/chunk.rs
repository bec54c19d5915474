use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::{Document, Span};
use crate::{Error, Result};

/// Input budget per request: half of a 4,096-token context, leaving the
/// other half for the generated summary.
pub const DEFAULT_MAX_CHUNK_TOKENS: usize = 2048;

/// A partition of a document's sentences into token-bounded chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    pub doc_id: String,
    pub max_tokens: usize,
    /// Sentence-index ranges, in order, covering every sentence once.
    pub chunks: Vec<Range<usize>>,
}

impl ChunkPlan {
    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    /// Byte span of chunk `i`. Chunks tile the whole text: the first starts
    /// at byte 0, each later one at its first sentence, and the last runs to
    /// the end, so inter-sentence whitespace belongs to the preceding chunk.
    pub fn chunk_span(&self, doc: &Document, i: usize) -> Span {
        let start = if i == 0 { 0 } else { doc.sentences[self.chunks[i].start].start };
        let end = match self.chunks.get(i + 1) {
            Some(next) => doc.sentences[next.start].start,
            None => doc.text.len(),
        };
        Span::new(start, end)
    }

    pub fn chunk_text<'a>(&self, doc: &'a Document, i: usize) -> &'a str {
        self.chunk_span(doc, i).slice(&doc.text)
    }

    pub fn chunk_tokens(&self, doc: &Document, i: usize) -> usize {
        doc.sentence_tokens[self.chunks[i].clone()].iter().sum()
    }
}

/// Greedy left-to-right packing of whole units (sentences, or speaker turns
/// for transcripts) into chunks of at most `max_tokens` tokens.
pub fn plan_chunks(doc: &Document, max_tokens: usize) -> Result<ChunkPlan> {
    if max_tokens == 0 {
        return Err(Error::InvalidParameter(String::from("max_tokens must be positive")));
    }
    let mut chunks = Vec::new();
    let mut current: Option<Range<usize>> = None;
    let mut used = 0usize;
    for unit in doc.units() {
        let tokens: usize = doc.sentence_tokens[unit.clone()].iter().sum();
        if tokens > max_tokens {
            return Err(Error::OversizedUnit {
                doc_id: doc.doc_id.clone(),
                start: doc.sentences[unit.start].start,
                end: doc.sentences[unit.end - 1].end,
                tokens,
                max_tokens,
            });
        }
        match current.as_mut() {
            Some(chunk) if used + tokens <= max_tokens => {
                chunk.end = unit.end;
                used += tokens;
            }
            _ => {
                if let Some(done) = current.take() {
                    chunks.push(done);
                }
                current = Some(unit);
                used = tokens;
            }
        }
    }
    chunks.extend(current);
    Ok(ChunkPlan {
        doc_id: doc.doc_id.clone(),
        max_tokens,
        chunks,
    })
}
