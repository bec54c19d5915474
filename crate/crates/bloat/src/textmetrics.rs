//! The metrics stage: one metric vector per original document and per
//! summary, plus adjacent-period similarity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use bloat_core::metrics::{
    boilerplate_share, cosine_similarity, fog, plain_english_components, sentiment, tetragram_census, uncertainty,
    Lexicon, MetricVector, PlainEnglishComponents, PlainEnglishMode, PlainEnglishReference, SyllableCounter,
};
use bloat_core::text::{words, Document, DocumentKind, Segmenter, SentenceSplitter};
use rayon::prelude::*;

use crate::csvio::Table;
use crate::io::fmt_opt;
use crate::Result;

pub const METRIC_COLUMNS: [&str; 6] = ["length", "sentiment", "uncertainty", "fog", "plain_eng", "boilerplate_pct"];

/// Per-text measures before corpus-dependent adjustments.
struct Partial {
    vector: MetricVector,
    components: Option<PlainEnglishComponents>,
}

fn measure(text: &str, lexicon: &Lexicon, splitter: &SentenceSplitter, syllables: &SyllableCounter) -> Partial {
    let components = plain_english_components(text, splitter).ok();
    Partial {
        vector: MetricVector {
            length: words(text).count(),
            sentiment: sentiment(text, lexicon),
            uncertainty: uncertainty(text, lexicon).ok(),
            fog: fog(text, &lexicon.fog_whitelist, splitter, syllables).ok(),
            plain_eng: components.map(|c| c.raw_sum()),
            boilerplate_pct: None,
        },
        components,
    }
}

/// Boilerplate shares with the census taken per (kind, period); groups of
/// fewer than two documents get no value.
pub fn boilerplate(docs: &[Document]) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<(DocumentKind, &str), Vec<&Document>> = BTreeMap::new();
    for d in docs {
        groups.entry((d.kind, d.period.as_str())).or_default().push(d);
    }
    groups
        .into_par_iter()
        .filter(|(_, g)| g.len() >= 2)
        .flat_map_iter(|(_, g)| {
            let census = tetragram_census(&g);
            g.into_iter().map(move |d| (d.doc_id.clone(), boilerplate_share(d, &census))).collect::<Vec<_>>()
        })
        .collect()
}

/// Metric vectors for documents and for texts derived from them (their
/// summaries). Plain-English z-scores use the original documents as the
/// reference distribution in standardized mode.
pub fn compute(
    docs: &[Document],
    summaries: &[(String, String)],
    lexicon: &Lexicon,
    mode: PlainEnglishMode,
) -> Result<(BTreeMap<String, MetricVector>, BTreeMap<String, MetricVector>)> {
    let splitter = SentenceSplitter::default();
    let syllables = SyllableCounter::default();
    let raw: Vec<Partial> = docs.par_iter().map(|d| measure(&d.text, lexicon, &splitter, &syllables)).collect();
    let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let summary_docs: Vec<Document> = summaries
        .par_iter()
        .filter_map(|(id, text)| {
            let d = by_id.get(id.as_str())?;
            Some(Document::new(id.as_str(), d.firm_id.as_str(), d.period.as_str(), d.kind, text.as_str(), &Segmenter::default()))
        })
        .collect();
    let summ: Vec<Partial> = summary_docs.par_iter().map(|d| measure(&d.text, lexicon, &splitter, &syllables)).collect();
    let reference = match mode {
        PlainEnglishMode::Raw => None,
        PlainEnglishMode::Standardized => {
            let comps: Vec<PlainEnglishComponents> = raw.iter().filter_map(|p| p.components).collect();
            PlainEnglishReference::from_components(&comps).ok()
        }
    };
    let finish = |docs: &[Document], parts: Vec<Partial>| -> BTreeMap<String, MetricVector> {
        let bp = boilerplate(docs);
        docs.iter()
            .zip(parts)
            .map(|(d, p)| {
                let mut v = p.vector;
                if let Some(r) = &reference {
                    v.plain_eng = p.components.map(|c| r.standardize(&c));
                } else if mode == PlainEnglishMode::Standardized {
                    v.plain_eng = None;
                }
                v.boilerplate_pct = bp.get(&d.doc_id).copied();
                (d.doc_id.clone(), v)
            })
            .collect()
    };
    Ok((finish(docs, raw), finish(&summary_docs, summ)))
}

pub fn to_csv(metrics: &BTreeMap<String, MetricVector>, order: &[String]) -> String {
    let mut out = format!("doc_id,{}\n", METRIC_COLUMNS.join(","));
    for id in order {
        let Some(v) = metrics.get(id) else { continue };
        let _ = writeln!(
            out,
            "{id},{},{},{},{},{},{}",
            v.length,
            fmt_opt(v.sentiment),
            fmt_opt(v.uncertainty),
            fmt_opt(v.fog),
            fmt_opt(v.plain_eng),
            fmt_opt(v.boilerplate_pct)
        );
    }
    out
}

pub fn read_csv(path: &Path) -> Result<BTreeMap<String, MetricVector>> {
    let mut req = vec!["doc_id"];
    req.extend(METRIC_COLUMNS);
    let t = Table::read(path, &req)?;
    let mut out = BTreeMap::new();
    for (i, r) in t.rows.iter().enumerate() {
        let v = MetricVector {
            length: t.f64(i, "length")? as usize,
            sentiment: t.opt_f64(i, "sentiment")?,
            uncertainty: t.opt_f64(i, "uncertainty")?,
            fog: t.opt_f64(i, "fog")?,
            plain_eng: t.opt_f64(i, "plain_eng")?,
            boilerplate_pct: t.opt_f64(i, "boilerplate_pct")?,
        };
        out.insert(t.get(r, "doc_id").to_string(), v);
    }
    Ok(out)
}

/// Cosine similarity between each firm's consecutive texts of the same
/// kind, ordered by period label.
pub fn adjacent_similarity<'a>(items: impl IntoIterator<Item = (&'a str, DocumentKind, &'a str, &'a str)>) -> BTreeMap<DocumentKind, Vec<f64>> {
    let mut series: BTreeMap<(&str, DocumentKind), Vec<(&str, &str)>> = BTreeMap::new();
    for (firm, kind, period, text) in items {
        series.entry((firm, kind)).or_default().push((period, text));
    }
    let mut out: BTreeMap<DocumentKind, Vec<f64>> = BTreeMap::new();
    for ((_, kind), mut s) in series {
        s.sort_by(|a, b| a.0.cmp(b.0));
        for w in s.windows(2) {
            if let Ok(c) = cosine_similarity(w[0].1, w[1].1) {
                out.entry(kind).or_default().push(c);
            }
        }
    }
    out
}
