use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{compute_bloat, LengthUnit, Summary};
use crate::econometrics::icc;
use crate::text::Document;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub doc_id: String,
    pub bloats: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation across trials.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub documents: Vec<TrialStats>,
    /// One-way random-effects ICC of bloat across documents; needs two or
    /// more documents.
    pub icc: Option<f64>,
}

/// Summarizes every document `trials` times and reports how much bloat
/// moves between runs. `summarize` receives the trial index.
pub fn repeat_stability<F, E>(docs: &[Document], trials: usize, unit: LengthUnit, mut summarize: F) -> Result<StabilityReport, E>
where
    F: FnMut(&Document, usize) -> Result<Summary, E>,
    E: From<Error>,
{
    if trials < 2 {
        return Err(Error::InvalidParameter(String::from("stability needs at least two trials")).into());
    }
    let mut documents = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut bloats = Vec::with_capacity(trials);
        for t in 0..trials {
            let summary = summarize(doc, t)?;
            bloats.push(compute_bloat(doc, &summary, unit)?.bloat);
        }
        let mean = bloats.iter().sum::<f64>() / trials as f64;
        let std = libm::sqrt(bloats.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / trials as f64);
        documents.push(TrialStats { doc_id: doc.doc_id.clone(), bloats, mean, std });
    }
    let icc = if documents.len() >= 2 {
        let matrix: Vec<Vec<f64>> = documents.iter().map(|d| d.bloats.clone()).collect();
        Some(icc(&matrix)?)
    } else {
        None
    };
    Ok(StabilityReport { documents, icc })
}
