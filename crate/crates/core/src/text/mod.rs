//! Document segmentation: tokens, sentences, transcript turns, markup
//! cleaning and chunk planning under a token budget.

mod chunk;
mod clean;
mod document;
mod sentences;
mod tokenize;

pub use chunk::{plan_chunks, ChunkPlan, DEFAULT_MAX_CHUNK_TOKENS};
pub use clean::clean_text;
pub use document::{Document, DocumentKind, Segmenter};
pub use sentences::{SentenceSplitter, DEFAULT_ABBREVIATIONS};
pub use tokenize::{words, Token, TokenKind, Tokenizer, WordPieceTokenizer};

use serde::{Deserialize, Serialize};

/// Half-open byte range into a document's text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}
