use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::{SentenceSplitter, Span, Tokenizer, WordPieceTokenizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DocumentKind {
    #[serde(rename = "MDNA")]
    Mdna,
    #[serde(rename = "CallTranscript")]
    CallTranscript,
}

impl DocumentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DocumentKind::Mdna => "MDNA",
            DocumentKind::CallTranscript => "CallTranscript",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            x if x.eq_ignore_ascii_case("mdna") || x.eq_ignore_ascii_case("md&a") => Some(DocumentKind::Mdna),
            x if x.eq_ignore_ascii_case("calltranscript")
                || x.eq_ignore_ascii_case("call")
                || x.eq_ignore_ascii_case("transcript") =>
            {
                Some(DocumentKind::CallTranscript)
            }
            _ => None,
        }
    }
}

/// Tokenizer plus sentence splitter; the unit of configuration for
/// segmenting documents.
pub struct Segmenter {
    pub tokenizer: Box<dyn Tokenizer>,
    pub splitter: SentenceSplitter,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            tokenizer: Box::new(WordPieceTokenizer),
            splitter: SentenceSplitter::default(),
        }
    }
}

impl core::fmt::Debug for Segmenter {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Segmenter")
            .field("tokenizer", &self.tokenizer.rules_version())
            .field("splitter", &self.splitter)
            .finish()
    }
}

/// One disclosure text with its segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub firm_id: String,
    /// ISO date or year-quarter label.
    pub period: String,
    pub kind: DocumentKind,
    pub text: String,
    pub sentences: Vec<Span>,
    pub sentence_tokens: Vec<usize>,
    /// Speaker turns as sentence-index ranges; empty for MD&A.
    pub turns: Vec<Range<usize>>,
    pub token_count: usize,
}

impl Document {
    /// Segments already-cleaned `text`.
    pub fn new(
        doc_id: impl Into<String>,
        firm_id: impl Into<String>,
        period: impl Into<String>,
        kind: DocumentKind,
        text: impl Into<String>,
        segmenter: &Segmenter,
    ) -> Self {
        let text = text.into();
        let transcript = kind == DocumentKind::CallTranscript;
        let sentences = segmenter.splitter.split(&text, transcript);
        let tokens = segmenter.tokenizer.tokenize(&text);
        let mut sentence_tokens = Vec::with_capacity(sentences.len());
        let mut t = 0;
        for s in &sentences {
            while t < tokens.len() && tokens[t].span.start < s.start {
                t += 1;
            }
            let first = t;
            while t < tokens.len() && tokens[t].span.start < s.end {
                t += 1;
            }
            sentence_tokens.push(t - first);
        }
        let turns = if transcript { speaker_turns(&text, &sentences) } else { Vec::new() };
        Document {
            doc_id: doc_id.into(),
            firm_id: firm_id.into(),
            period: period.into(),
            kind,
            token_count: tokens.len(),
            text,
            sentences,
            sentence_tokens,
            turns,
        }
    }

    /// Units that chunking must keep whole: speaker turns for transcripts,
    /// sentences otherwise.
    pub fn units(&self) -> Vec<Range<usize>> {
        match self.kind {
            DocumentKind::CallTranscript => self.turns.clone(),
            DocumentKind::Mdna => (0..self.sentences.len()).map(|i| i..i + 1).collect(),
        }
    }

    pub fn sentence_text(&self, i: usize) -> &str {
        self.sentences[i].slice(&self.text)
    }
}

/// A transcript line of the form `<Name> -- <Role>`, or one led by the
/// `Operator` token, opens a speaker turn.
pub(crate) fn is_speaker_header(line: &str) -> bool {
    let line = line.trim();
    if let Some(rest) = line.strip_prefix("Operator") {
        return rest.is_empty() || rest.starts_with([' ', '\t', ':', '-']);
    }
    match line.split_once(" -- ") {
        Some((name, role)) => {
            !name.trim().is_empty() && !role.trim().is_empty() && line.len() <= 160
        }
        None => false,
    }
}

fn line_start(text: &str, byte: usize) -> bool {
    text[..byte].rfind('\n').map_or(text[..byte].trim().is_empty(), |nl| {
        text[nl + 1..byte].trim().is_empty()
    })
}

fn speaker_turns(text: &str, sentences: &[Span]) -> Vec<Range<usize>> {
    let line_of = |s: &Span| {
        let end = text[s.start..].find('\n').map_or(text.len(), |e| s.start + e);
        &text[s.start..end]
    };
    let starts_line: Vec<bool> = sentences.iter().map(|s| line_start(text, s.start)).collect();
    let headers: Vec<bool> = sentences
        .iter()
        .zip(&starts_line)
        .map(|(s, &sl)| sl && is_speaker_header(line_of(s)))
        .collect();
    let mut turns = Vec::new();
    let mut begin = 0;
    let mut seen_header = headers.first().copied().unwrap_or(false);
    for i in 1..sentences.len() {
        // Before the first header each line is its own turn.
        let opens = headers[i] || (starts_line[i] && !seen_header);
        seen_header |= headers[i];
        if opens {
            turns.push(begin..i);
            begin = i;
        }
    }
    if !sentences.is_empty() {
        turns.push(begin..sentences.len());
    }
    turns
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn token_count_matches_tokenizer_and_sentences() {
        let seg = Segmenter::default();
        let doc = Document::new("d", "f", "2020", DocumentKind::Mdna, "Sales rose 5%. Costs fell.", &seg);
        assert_eq!(doc.token_count, 8);
        assert_eq!(doc.sentence_tokens, vec![5, 3]);
        assert_eq!(doc.sentence_text(1), "Costs fell.");
        assert!(doc.turns.is_empty());
    }

    #[test]
    fn transcript_turns_follow_headers() {
        let text = "Call preamble line\nOperator\nWelcome. Please hold.\nJane Doe -- CEO\nThanks. Good quarter.\nMore from me.\nJohn Roe -- Analyst\nQuestion?";
        let seg = Segmenter::default();
        let doc = Document::new("d", "f", "2020Q1", DocumentKind::CallTranscript, text, &seg);
        let turns: Vec<Vec<&str>> = doc
            .turns
            .iter()
            .map(|r| r.clone().map(|i| doc.sentence_text(i)).collect())
            .collect();
        assert_eq!(
            turns,
            vec![
                vec!["Call preamble line"],
                vec!["Operator", "Welcome.", "Please hold."],
                vec!["Jane Doe -- CEO", "Thanks.", "Good quarter.", "More from me."],
                vec!["John Roe -- Analyst", "Question?"],
            ]
        );
    }

    #[test]
    fn transcript_without_headers_uses_lines() {
        let text = "First speaker says hi. Twice.\nSecond line.";
        let doc = Document::new("d", "f", "p", DocumentKind::CallTranscript, text, &Segmenter::default());
        assert_eq!(doc.turns, vec![0..2, 2..3]);
    }

    #[test]
    fn header_detection() {
        assert!(is_speaker_header("Jane Doe -- Chief Financial Officer"));
        assert!(is_speaker_header("Operator: next question"));
        assert!(!is_speaker_header("Operators run the plant."));
        assert!(!is_speaker_header(" -- CEO"));
    }

    #[test]
    fn kind_parse_round_trip() {
        for k in [DocumentKind::Mdna, DocumentKind::CallTranscript] {
            assert_eq!(DocumentKind::parse(k.as_str()), Some(k));
        }
        assert_eq!(DocumentKind::parse("10-K"), None);
    }
}
