use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{optimal_length, token_relevance, AttentionModel, ChunkSummary, RelevanceProfile, Summary, SummarySource, UtilityParams};
use crate::text::{ChunkPlan, Document, Span, Tokenizer, WordPieceTokenizer};
use crate::Result;

/// What the reference summarizer keeps: individual tokens, or whole
/// sentences ranked by their mean token relevance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Token,
    Sentence,
}

/// Rebuilds text from kept spans: neighbours keep the original gap between
/// them, separated spans are joined by one space.
fn stitch(text: &str, spans: &[Span], keep: &[usize]) -> String {
    let mut out = String::new();
    let mut prev: Option<usize> = None;
    for &i in keep {
        match prev {
            Some(p) if p + 1 == i => out.push_str(&text[spans[p].end..spans[i].start]),
            Some(_) => out.push(' '),
            None => {}
        }
        out.push_str(spans[i].slice(text));
        prev = Some(i);
    }
    out
}

fn kept_in_order(profile: &RelevanceProfile, params: &UtilityParams) -> Vec<usize> {
    let n_star = optimal_length(profile, params);
    let mut keep: Vec<usize> = profile.order[..n_star].to_vec();
    keep.sort_unstable();
    keep
}

/// Summarizes `doc.text[range]`; `sentences` are the document sentences
/// inside that range.
fn summarize_range(
    doc: &Document,
    range: Span,
    sentences: &[Span],
    model: &AttentionModel,
    params: &UtilityParams,
    granularity: Granularity,
) -> Result<String> {
    let spans: Vec<Span> = WordPieceTokenizer
        .tokenize(range.slice(&doc.text))
        .into_iter()
        .map(|t| Span::new(t.span.start + range.start, t.span.end + range.start))
        .collect();
    if spans.is_empty() {
        return Ok(String::new());
    }
    let tokens: Vec<&str> = spans.iter().map(|s| s.slice(&doc.text)).collect();
    let relevance = token_relevance(&tokens, model)?.normalized_by_max();
    match granularity {
        Granularity::Token => Ok(stitch(&doc.text, &spans, &kept_in_order(&relevance, params))),
        Granularity::Sentence => {
            let mut t = 0;
            let mut scores = Vec::with_capacity(sentences.len());
            for s in sentences {
                while t < spans.len() && spans[t].start < s.start {
                    t += 1;
                }
                let first = t;
                while t < spans.len() && spans[t].start < s.end {
                    t += 1;
                }
                let inside = &relevance.scores[first..t];
                scores.push(if inside.is_empty() { 0.0 } else { inside.iter().sum::<f64>() / inside.len() as f64 });
            }
            let profile = RelevanceProfile::from_scores(scores)?.normalized_by_max();
            Ok(stitch(&doc.text, sentences, &kept_in_order(&profile, params)))
        }
    }
}

/// Extractive summary of the whole document: the `n*` most relevant units,
/// in document order.
pub fn extract_summary(
    doc: &Document,
    model: &AttentionModel,
    params: &UtilityParams,
    granularity: Granularity,
) -> Result<Summary> {
    params.validate()?;
    let text = summarize_range(doc, Span::new(0, doc.text.len()), &doc.sentences, model, params, granularity)?;
    Ok(Summary::new(doc.doc_id.clone(), text, SummarySource::Reference { granularity }))
}

/// Summarizes each chunk independently and joins the pieces with a
/// newline, mirroring how long documents go through a remote model.
pub fn extract_summary_chunked(
    doc: &Document,
    plan: &ChunkPlan,
    model: &AttentionModel,
    params: &UtilityParams,
    granularity: Granularity,
) -> Result<Summary> {
    params.validate()?;
    let chunks = (0..plan.len())
        .map(|i| {
            let sentences = &doc.sentences[plan.chunks[i].clone()];
            let text = summarize_range(doc, plan.chunk_span(doc, i), sentences, model, params, granularity)?;
            Ok(ChunkSummary { index: i, empty_chunk: text.is_empty(), text })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary::from_chunks(doc.doc_id.clone(), chunks, SummarySource::Reference { granularity }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::text::{words, DocumentKind, Segmenter};
    use crate::Error;
    use alloc::vec;

    fn mdna(text: &str) -> Document {
        Document::new("d", "f", "2020", DocumentKind::Mdna, text, &Segmenter::default())
    }

    /// Keys point along the first axis only for "key" tokens, and every
    /// query points the same way, so attention piles onto those tokens.
    fn planted_model(vocab: &[&str], planted: &[&str]) -> AttentionModel {
        let rows: Vec<Vec<f64>> = vocab.iter().map(|w| vec![1.0, if planted.contains(w) { 1.0 } else { 0.0 }]).collect();
        let wq = Matrix::from_rows(&[vec![8.0], vec![0.0]]);
        let wk = Matrix::from_rows(&[vec![0.0], vec![1.0]]);
        AttentionModel::new(vocab.iter().map(|w| String::from(*w)).collect(), Matrix::from_rows(&rows), wq, wk, Matrix::identity(2)).unwrap()
    }

    #[test]
    fn planted_tokens_survive_in_order() {
        let vocab = ["the", "firm", "revenue", "grew", "and", "profit", "rose", "."];
        let model = planted_model(&vocab, &["revenue", "profit"]);
        let doc = mdna("The firm revenue grew and the firm profit rose.");
        let s = extract_summary(&doc, &model, &UtilityParams::default(), Granularity::Token).unwrap();
        assert_eq!(s.summary_text, "revenue profit");
        assert_eq!(s.summary_tokens, 2);
    }

    #[test]
    fn keep_everything_reproduces_text() {
        let model = AttentionModel::seeded(["same"], 4, 2, 2, 1).unwrap();
        let doc = mdna("same same  same\nsame");
        let s = extract_summary(&doc, &model, &UtilityParams::default(), Granularity::Token).unwrap();
        assert_eq!(s.summary_text, doc.text);
    }

    #[test]
    fn most_relevant_token_always_survives() {
        let model = planted_model(&["a", "b", "c"], &["a"]);
        let params = UtilityParams::linear(1.0, 1e9).unwrap();
        let s = extract_summary(&mdna("b a c b c"), &model, &params, Granularity::Token).unwrap();
        assert_eq!(s.summary_text, "a");
        let empty = extract_summary(&mdna(""), &model, &params, Granularity::Token).unwrap();
        assert_eq!((empty.summary_text.as_str(), empty.summary_tokens), ("", 0));
    }

    #[test]
    fn output_is_ordered_subsequence() {
        let text = "Net sales increased 12% in fiscal 2020. Gross margin declined. We expect growth to continue.";
        let doc = mdna(text);
        let model = AttentionModel::seeded(WordPieceTokenizer.tokenize(text).iter().map(|t| t.span.slice(text)), 8, 4, 4, 3).unwrap();
        let s = extract_summary(&doc, &model, &UtilityParams::default(), Granularity::Token).unwrap();
        let all: Vec<&str> = WordPieceTokenizer.tokenize(text).iter().map(|t| t.span.slice(text)).collect();
        let mut it = all.iter();
        for tok in WordPieceTokenizer.tokenize(&s.summary_text) {
            let piece = tok.span.slice(&s.summary_text);
            assert!(it.any(|t| *t == piece), "{piece} out of order");
        }
        assert!(words(&s.summary_text).count() <= words(text).count());
    }

    #[test]
    fn sentence_mode_keeps_whole_sentences() {
        let vocab = ["revenue", "the", "weather", "was", "mild", "."];
        let model = planted_model(&vocab, &["revenue"]);
        let doc = mdna("Revenue revenue revenue. The weather was mild. Revenue revenue revenue.");
        let s = extract_summary(&doc, &model, &UtilityParams::default(), Granularity::Sentence).unwrap();
        assert_eq!(s.summary_text, "Revenue revenue revenue. Revenue revenue revenue.");
    }

    #[test]
    fn chunked_summary_joins_with_newline() {
        let vocab = ["alpha", "beta", "."];
        let model = planted_model(&vocab, &["alpha"]);
        let doc = mdna("alpha beta beta. alpha beta beta.");
        let plan = crate::text::plan_chunks(&doc, 4).unwrap();
        assert_eq!(plan.len(), 2);
        let s = extract_summary_chunked(&doc, &plan, &model, &UtilityParams::default(), Granularity::Token).unwrap();
        assert_eq!(s.summary_text, "alpha\nalpha");
        assert_eq!(s.chunk_summaries.len(), 2);
    }

    #[test]
    fn unknown_tokens_fail() {
        let model = planted_model(&["a"], &[]);
        assert_eq!(
            extract_summary(&mdna("a z"), &model, &UtilityParams::default(), Granularity::Token),
            Err(Error::UnknownToken(String::from("z")))
        );
    }
}
