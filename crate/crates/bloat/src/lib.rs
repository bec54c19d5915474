//! Disclosure bloat pipeline: ingest 10-K MD&A sections and earnings-call
//! transcripts, summarize them, measure the original and summarized text,
//! merge capital-market outcomes and run panel regressions.
//!
//! The numerical work lives in [`bloat_core`]; this crate adds file
//! formats, the remote summarization client, stage caching and the `bloat`
//! command-line tool.

pub mod config;
pub mod corpus;
mod csvio;
mod error;
pub mod io;
pub mod lexicon;
pub mod market;
pub mod panel;
pub mod pipeline;
pub mod prompts;
pub mod remote;
pub mod report;
pub mod summaries;
pub mod textmetrics;

pub use error::{Error, Result};
