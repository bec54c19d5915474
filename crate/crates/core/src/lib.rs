//! Core algorithms for measuring informational bloat in long business
//! documents.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std` (an allocator is required). File formats, the remote
//! summarization client and the command-line pipeline live in the `bloat`
//! companion crate.
//!
//! Module map:
//!
//! - [`text`]: tokenizer, sentence splitter, transcript turns, markup
//!   cleaning and token-budget chunk planning.
//! - [`metrics`]: lexicon sentiment and uncertainty, Fog, plain-English
//!   score, tetragram boilerplate and bag-of-words cosine similarity.
//! - [`summarizer`]: the attention/utility reference summarizer, bloat,
//!   targeted-summary statistics and repeat-trial stability.
//! - [`market`]: event-study returns, SUE, Lee-Ready classification, PIN,
//!   spreads and volatility measures.
//! - [`econometrics`]: winsorization, fixed-effects OLS with cluster-robust
//!   errors, variance decomposition, transition matrices, ICC and the
//!   lagged-IV measurement-error estimator.

#![no_std]

extern crate alloc;

pub mod econometrics;
mod error;
pub mod linalg;
pub mod market;
pub mod metrics;
pub mod optim;
pub mod stats;
pub mod summarizer;
pub mod text;

pub use error::{Error, Result};
