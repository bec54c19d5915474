//! Linguistic measures applied to original documents and their summaries.

mod boilerplate;
mod lexicon;
mod readability;
mod similarity;
mod syllables;

pub use boilerplate::{boilerplate_pct, boilerplate_share, tetragram_census, TetragramCensus};
pub use lexicon::{sentiment, uncertainty, Lexicon, LexiconCounts};
pub use readability::{
    fog, plain_english, plain_english_components, PlainEnglishComponents, PlainEnglishMode,
    PlainEnglishReference,
};
pub use similarity::cosine_similarity;
pub use syllables::{SyllableCounter, DEFAULT_SYLLABLE_EXCEPTIONS};

use serde::{Deserialize, Serialize};

/// Every measure for one text. `None` marks an undefined value (sentiment
/// with no dictionary hits, or a measure that needs at least one word).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricVector {
    /// Word count.
    pub length: usize,
    pub sentiment: Option<f64>,
    pub uncertainty: Option<f64>,
    pub fog: Option<f64>,
    pub plain_eng: Option<f64>,
    /// Corpus-dependent; filled in after the per-period census.
    pub boilerplate_pct: Option<f64>,
}
