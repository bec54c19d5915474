use alloc::string::String;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("document {doc_id}: unit at bytes {start}..{end} has {tokens} tokens, over the {max_tokens}-token budget")]
    OversizedUnit {
        doc_id: String,
        start: usize,
        end: usize,
        tokens: usize,
        max_tokens: usize,
    },
    #[error("document has no words")]
    EmptyDocument,
    #[error("plain-English standardization requested without reference statistics")]
    MissingReference,
    #[error("period group {0:?} has fewer than two documents")]
    GroupTooSmall(String),
    #[error("token {0:?} is not in the model vocabulary")]
    UnknownToken(String),
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("summary for {doc_id} has {n_star} units, more than the original {n}")]
    SummaryExceedsOriginal { doc_id: String, n: usize, n_star: usize },
    #[error("no matching document for {0:?}")]
    UnmatchedDoc(String),
    #[error("required dates missing from series: {0}")]
    MissingDates(String),
    #[error("price must be positive")]
    NonpositivePrice,
    #[error("trade {0} cannot be classified: no prevailing quote and no prior price change")]
    UnclassifiableLeadingTrade(usize),
    #[error("optimizer did not converge")]
    DidNotConverge,
    #[error("all order-flow counts are zero")]
    DegenerateCounts,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("pre-event volatility is zero")]
    ZeroPreVolatility,
    #[error("cumulative abnormal return over the full window is zero")]
    ZeroTotalReturn,
    #[error("every value is missing")]
    AllMissing,
    #[error("regressor {0:?} is collinear with the other regressors or absorbed fixed effects")]
    RankDeficient(String),
    #[error("need at least two clusters, found {0}")]
    TooFewClusters(usize),
    #[error("period {period:?} has {firms} firms, need at least 5")]
    TooFewFirms { period: String, firms: usize },
    #[error("need at least three years, found {0}")]
    TooFewYears(usize),
    #[error("no observation has two lags available")]
    InsufficientLags,
    #[error("unknown field {0:?}")]
    UnknownField(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
