use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::{words, Document};
use crate::{Error, Result};

/// Lower-cased word with everything but letters and digits removed.
fn normalize(word: &str) -> String {
    word.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

fn sentence_words(doc: &Document) -> Vec<Vec<String>> {
    doc.sentences
        .iter()
        .map(|s| words(s.slice(&doc.text)).map(normalize).filter(|w| !w.is_empty()).collect())
        .collect()
}

fn tetragrams(sentence: &[String]) -> impl Iterator<Item = String> + '_ {
    sentence.windows(4).map(|w| w.join(" "))
}

/// Tetragrams present in more than 75% of a group's documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TetragramCensus {
    pub documents: usize,
    pub common: BTreeSet<String>,
}

impl TetragramCensus {
    pub fn contains(&self, gram: &str) -> bool {
        self.common.contains(gram)
    }
}

/// Counts, for every tetragram, the documents containing it (within a
/// sentence), and keeps those with document frequency above 75%.
pub fn tetragram_census(group: &[&Document]) -> TetragramCensus {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in group {
        let present: BTreeSet<String> = sentence_words(doc).iter().flat_map(|s| tetragrams(s).collect::<Vec<_>>()).collect();
        for g in present {
            *df.entry(g).or_insert(0) += 1;
        }
    }
    let n = group.len();
    let common = df.into_iter().filter(|&(_, c)| 4 * c > 3 * n).map(|(g, _)| g).collect();
    TetragramCensus { documents: n, common }
}

/// Share of a document's words that sit in sentences containing at least
/// one common tetragram. A document without words scores 0.
pub fn boilerplate_share(doc: &Document, census: &TetragramCensus) -> f64 {
    let sentences = sentence_words(doc);
    let total: usize = sentences.iter().map(Vec::len).sum();
    if total == 0 {
        return 0.0;
    }
    let boiler: usize = sentences
        .iter()
        .filter(|s| tetragrams(s).any(|g| census.contains(&g)))
        .map(Vec::len)
        .sum();
    boiler as f64 / total as f64
}

/// Boilerplate share for every document, with the census taken separately
/// within each period. Every period needs at least two documents.
pub fn boilerplate_pct(corpus: &[Document]) -> Result<BTreeMap<String, f64>> {
    let mut groups: BTreeMap<&str, Vec<&Document>> = BTreeMap::new();
    for doc in corpus {
        groups.entry(doc.period.as_str()).or_default().push(doc);
    }
    let mut out = BTreeMap::new();
    for (period, group) in groups {
        if group.len() < 2 {
            return Err(Error::GroupTooSmall(String::from(period)));
        }
        let census = tetragram_census(&group);
        for doc in group {
            out.insert(doc.doc_id.clone(), boilerplate_share(doc, &census));
        }
    }
    Ok(out)
}
