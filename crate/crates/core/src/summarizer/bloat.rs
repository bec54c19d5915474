use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::{words, Document, Tokenizer, WordPieceTokenizer};
use crate::{Error, Result};

use super::Granularity;

/// How summary and document lengths are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    #[default]
    Words,
    Tokens,
}

impl LengthUnit {
    pub fn count(&self, text: &str) -> usize {
        match self {
            LengthUnit::Words => words(text).count(),
            LengthUnit::Tokens => WordPieceTokenizer.count(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SummarySource {
    Reference { granularity: Granularity },
    Remote { model: String, temperature: f64, prompt_id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSummary {
    pub index: usize,
    pub text: String,
    /// The response body was empty.
    pub empty_chunk: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub doc_id: String,
    pub summary_text: String,
    pub summary_tokens: usize,
    pub summary_words: usize,
    pub source: SummarySource,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chunk_summaries: Vec<ChunkSummary>,
}

impl Summary {
    pub fn new(doc_id: impl Into<String>, text: String, source: SummarySource) -> Self {
        Summary {
            doc_id: doc_id.into(),
            summary_tokens: LengthUnit::Tokens.count(&text),
            summary_words: LengthUnit::Words.count(&text),
            summary_text: text,
            source,
            chunk_summaries: Vec::new(),
        }
    }

    /// Joins chunk texts in index order with a single newline.
    pub fn from_chunks(doc_id: impl Into<String>, mut chunks: Vec<ChunkSummary>, source: SummarySource) -> Self {
        chunks.sort_by_key(|c| c.index);
        let text = chunks.iter().map(|c| c.text.as_str()).collect::<Vec<_>>().join("\n");
        let mut s = Summary::new(doc_id, text, source);
        s.chunk_summaries = chunks;
        s
    }

    pub fn length(&self, unit: LengthUnit) -> usize {
        match unit {
            LengthUnit::Words => self.summary_words,
            LengthUnit::Tokens => self.summary_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BloatScore {
    pub doc_id: String,
    pub n: usize,
    pub n_star: usize,
    pub bloat: f64,
    pub unit: LengthUnit,
}

/// `(n − n*)/n`, the share of the document a reader could skip.
pub fn compute_bloat(doc: &Document, summary: &Summary, unit: LengthUnit) -> Result<BloatScore> {
    let n = match unit {
        LengthUnit::Words => words(&doc.text).count(),
        LengthUnit::Tokens => doc.token_count,
    };
    if n == 0 {
        return Err(Error::EmptyDocument);
    }
    let n_star = summary.length(unit);
    if n_star > n {
        return Err(Error::SummaryExceedsOriginal { doc_id: doc.doc_id.clone(), n, n_star });
    }
    Ok(BloatScore { doc_id: doc.doc_id.clone(), n, n_star, bloat: (n - n_star) as f64 / n as f64, unit })
}

/// True for the "nothing relevant" answer targeted prompts ask for.
pub fn is_na_response(line: &str) -> bool {
    let t = line.trim().trim_end_matches('.').trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("n/a")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetedStats {
    pub doc_id: String,
    pub nonempty: bool,
    pub scaled_len: f64,
}

/// Whether each targeted summary found anything, and its length relative
/// to the document's ordinary summary. NA lines (one per chunk with nothing
/// on topic) are dropped before counting.
pub fn targeted_summary_stats(targeted: &[Summary], originals: &[Summary], unit: LengthUnit) -> Result<Vec<TargetedStats>> {
    let by_id: BTreeMap<&str, &Summary> = originals.iter().map(|s| (s.doc_id.as_str(), s)).collect();
    targeted
        .iter()
        .map(|t| {
            let original = by_id.get(t.doc_id.as_str()).ok_or_else(|| Error::UnmatchedDoc(t.doc_id.clone()))?;
            let kept: Vec<&str> = t.summary_text.lines().filter(|l| !is_na_response(l)).collect();
            if kept.is_empty() {
                return Ok(TargetedStats { doc_id: t.doc_id.clone(), nonempty: false, scaled_len: 0.0 });
            }
            let len = unit.count(&kept.join("\n"));
            let base = original.length(unit);
            if base == 0 {
                return Err(Error::InsufficientData(alloc::format!("original summary of {} is empty", t.doc_id)));
            }
            Ok(TargetedStats { doc_id: t.doc_id.clone(), nonempty: true, scaled_len: len as f64 / base as f64 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{DocumentKind, Segmenter};
    use alloc::format;
    use alloc::vec;

    fn doc(n: usize) -> Document {
        let text = (0..n).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        Document::new("d", "f", "2020", DocumentKind::Mdna, text, &Segmenter::default())
    }

    fn reference(text: &str) -> Summary {
        Summary::new("d", String::from(text), SummarySource::Reference { granularity: Granularity::Token })
    }

    #[test]
    fn bloat_arithmetic() {
        let d = doc(100);
        let s = reference(&(0..25).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" "));
        let b = compute_bloat(&d, &s, LengthUnit::Words).unwrap();
        assert_eq!((b.n, b.n_star, b.bloat), (100, 25, 0.75));
        let full = reference(&d.text);
        assert_eq!(compute_bloat(&d, &full, LengthUnit::Tokens).unwrap().bloat, 0.0);
    }

    #[test]
    fn bloat_errors() {
        let empty = Document::new("e", "f", "2020", DocumentKind::Mdna, String::new(), &Segmenter::default());
        assert_eq!(compute_bloat(&empty, &reference(""), LengthUnit::Words), Err(Error::EmptyDocument));
        let long = reference("a b c d");
        assert!(matches!(compute_bloat(&doc(3), &long, LengthUnit::Words), Err(Error::SummaryExceedsOriginal { .. })));
    }

    #[test]
    fn word_and_token_counts_differ_on_symbols() {
        let s = reference("Sales rose 5 % .");
        assert_eq!(s.summary_words, 2);
        assert_eq!(s.summary_tokens, 5);
    }

    #[test]
    fn chunks_concatenate_in_index_order() {
        let remote = SummarySource::Remote { model: String::from("m"), temperature: 0.5, prompt_id: String::from("p") };
        let chunks = vec![
            ChunkSummary { index: 1, text: String::from("w1' w2' w3'"), empty_chunk: false },
            ChunkSummary { index: 0, text: String::from("w1 w2 w3"), empty_chunk: false },
        ];
        let s = Summary::from_chunks("d", chunks, remote);
        assert_eq!(s.summary_text, "w1 w2 w3\nw1' w2' w3'");
        assert_eq!(s.chunk_summaries[0].index, 0);
    }

    #[test]
    fn targeted_stats() {
        let original = reference("one two three four");
        let na = Summary { summary_text: String::from("NA"), ..reference("") };
        let half = reference("NA\none two\nN/A.");
        let same = original.clone();
        let out = targeted_summary_stats(&[na, half, same], &[original], LengthUnit::Words).unwrap();
        assert_eq!((out[0].nonempty, out[0].scaled_len), (false, 0.0));
        assert_eq!((out[1].nonempty, out[1].scaled_len), (true, 0.5));
        assert_eq!((out[2].nonempty, out[2].scaled_len), (true, 1.0));
        let stray = Summary { doc_id: String::from("x"), ..reference("a") };
        assert_eq!(
            targeted_summary_stats(&[stray], &[reference("a")], LengthUnit::Words),
            Err(Error::UnmatchedDoc(String::from("x")))
        );
    }
}
