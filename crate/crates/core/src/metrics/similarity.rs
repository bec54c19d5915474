use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::text::words;
use crate::{Error, Result};

fn term_frequencies(text: &str) -> BTreeMap<String, u64> {
    let mut tf = BTreeMap::new();
    for w in words(text) {
        *tf.entry(w.to_lowercase()).or_insert(0) += 1;
    }
    tf
}

/// Cosine similarity of raw term-frequency vectors, scaled to [0, 100].
///
/// Norms are combined as `sqrt(|a|²·|b|²)` so that proportional vectors
/// score exactly 100.
pub fn cosine_similarity(a: &str, b: &str) -> Result<f64> {
    let ta = term_frequencies(a);
    let tb = term_frequencies(b);
    if ta.is_empty() || tb.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let dot: u64 = ta.iter().filter_map(|(w, &x)| tb.get(w).map(|&y| x * y)).sum();
    let na: u64 = ta.values().map(|x| x * x).sum();
    let nb: u64 = tb.values().map(|x| x * x).sum();
    let cos = dot as f64 / libm::sqrt(na as f64 * nb as f64);
    Ok((100.0 * cos).clamp(0.0, 100.0))
}
