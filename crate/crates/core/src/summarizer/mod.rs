//! The attention/utility reference summarizer and the bloat measure built
//! on any summarizer's output.
//!
//! A document's tokens are scored with scaled dot-product self-attention;
//! each token's relevance is the mean attention it receives. Ranking the
//! relevances in descending order, a reader with linear benefit `b` and cost
//! `c` keeps the prefix that maximizes
//! `U(k) = b·Σᵢ≤k s̄(i) − c·Σᵢ≤k (1 − s̄(i))`, and bloat is the share of the
//! document that falls outside that optimal summary.

mod attention;
mod bloat;
mod extract;
mod stability;
mod utility;

pub use attention::{attention_scores, relevance, row_mean_relevance, token_relevance, AttentionModel, RelevanceProfile};
pub use bloat::{
    compute_bloat, is_na_response, targeted_summary_stats, BloatScore, ChunkSummary, LengthUnit, Summary,
    SummarySource, TargetedStats,
};
pub use extract::{extract_summary, extract_summary_chunked, Granularity};
pub use stability::{repeat_stability, StabilityReport, TrialStats};
pub use utility::{optimal_length, utility_curve, UtilityParams, UtilityShape};
