//! Regression tables and the descriptive report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bloat_core::econometrics::{
    firm_fe_fraction, incremental_r2, measurement_error, ols_fe, quintile_transition, t_trend, FixedEffect,
    IncrementalShare, MeasurementError, QuintileTransition, RegressionResult, RegressionSpec, TTrend,
    DEFAULT_WEAK_INSTRUMENT_F,
};
use bloat_core::metrics::MetricVector;
use bloat_core::stats::{describe, mean, Describe};
use bloat_core::text::{Document, DocumentKind};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::config::RegressionBlock;
use crate::panel::{PanelRow, PanelTable};
use crate::summaries::{SummaryRecord, TargetedRecord};
use crate::textmetrics::adjacent_similarity;
use crate::{Error, Result};

/// Two-sided p-value of a t statistic.
pub fn p_value(t: f64, df: f64) -> f64 {
    if !t.is_finite() || df <= 0.0 {
        return f64::NAN;
    }
    match StudentsT::new(0.0, 1.0, df) {
        Ok(d) => 2.0 * (1.0 - d.cdf(t.abs())),
        Err(_) => f64::NAN,
    }
}

pub fn stars(p: f64) -> &'static str {
    match p {
        p if p < 0.01 => "***",
        p if p < 0.05 => "**",
        p if p < 0.10 => "*",
        _ => "",
    }
}

/// Inference degrees of freedom: clusters minus one when clustered.
pub fn inference_df(r: &RegressionResult) -> f64 {
    match r.clusters {
        Some(g) => g.saturating_sub(1) as f64,
        None => r.df_resid() as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodFit {
    pub period: String,
    pub n: usize,
    pub coefficient: f64,
    pub t_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionOutput {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<String>,
    pub spec: RegressionSpec,
    pub result: RegressionResult,
    pub p_values: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub by_period: Vec<PeriodFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_trend: Option<TTrend>,
}

fn leading_year(period: &str) -> Option<f64> {
    let digits: String = period.chars().take_while(char::is_ascii_digit).collect();
    (digits.len() == 4).then(|| digits.parse().ok()).flatten()
}

fn sample_rows<'a>(table: &'a PanelTable, block: &RegressionBlock) -> Vec<&'a PanelRow> {
    table.sample(block.sample.as_deref().and_then(DocumentKind::parse))
}

/// Fits one `[regression.<name>]` block, and its period-by-period variant
/// when requested.
pub fn fit(table: &PanelTable, name: &str, block: &RegressionBlock) -> Result<RegressionOutput> {
    let spec = block.to_spec(name)?;
    for f in std::iter::once(&spec.dependent).chain(&spec.regressors) {
        if table.column(f).is_none() {
            return Err(Error::Schema { path: "panel.csv".into(), column: f.clone() });
        }
    }
    let rows = sample_rows(table, block);
    let result = ols_fe(&table.to_core(&rows)?, &spec)?;
    let df = inference_df(&result);
    let p_values = result.t_values.iter().map(|t| p_value(*t, df)).collect();
    let mut out = RegressionOutput {
        name: name.to_string(),
        sample: block.sample.clone(),
        spec: spec.clone(),
        result,
        p_values,
        by_period: Vec::new(),
        t_trend: None,
    };
    if block.by_period {
        let Some(first) = spec.regressors.first() else { return Ok(out) };
        let mut per = spec.clone();
        per.fixed_effects = spec
            .fixed_effects
            .iter()
            .filter_map(|f| match f {
                FixedEffect::Time => None,
                FixedEffect::TimeIndustry => Some(FixedEffect::Industry),
                other => Some(*other),
            })
            .collect();
        per.fixed_effects.dedup();
        let mut periods: BTreeMap<&str, Vec<&PanelRow>> = BTreeMap::new();
        for r in &rows {
            periods.entry(r.time_id.as_str()).or_default().push(r);
        }
        for (period, rs) in periods {
            let fitted = table.to_core(&rs).and_then(|p| Ok(ols_fe(&p, &per)?));
            match fitted.map(|r| (r.n, r.coefficient(first))) {
                Ok((n, Some((coefficient, _, t_value)))) => {
                    out.by_period.push(PeriodFit { period: period.to_string(), n, coefficient, t_value })
                }
                Ok((_, None)) => {}
                Err(e) => tracing::debug!(regression = name, period, "period fit skipped: {e}"),
            }
        }
        let points: Vec<(f64, f64)> = out
            .by_period
            .iter()
            .enumerate()
            .filter(|(_, p)| p.t_value.is_finite())
            .map(|(i, p)| (leading_year(&p.period).unwrap_or(i as f64), p.t_value))
            .collect();
        out.t_trend = t_trend(&points).ok();
    }
    Ok(out)
}

fn fe_label(spec: &RegressionSpec) -> String {
    if spec.fixed_effects.is_empty() {
        return "none".into();
    }
    spec.fixed_effects.iter().map(FixedEffect::as_str).collect::<Vec<_>>().join(", ")
}

/// Side-by-side table: coefficients with stars, standard errors in
/// parentheses below, then the fixed effects, clustering, N and R².
pub fn regression_table(outputs: &[RegressionOutput]) -> String {
    let mut names: Vec<&str> = Vec::new();
    for o in outputs {
        for n in &o.result.names {
            if !names.contains(&n.as_str()) {
                names.push(n);
            }
        }
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut push = |label: &str, cells: Vec<String>| {
        let mut r = vec![label.to_string()];
        r.extend(cells);
        rows.push(r);
    };
    push("", (1..=outputs.len()).map(|i| format!("({i})")).collect());
    push("", outputs.iter().map(|o| o.name.clone()).collect());
    push("Dependent", outputs.iter().map(|o| o.result.dependent.clone()).collect());
    for n in &names {
        let mut coef = Vec::new();
        let mut se = Vec::new();
        for o in outputs {
            match o.result.names.iter().position(|x| x == n) {
                Some(i) => {
                    coef.push(format!("{:.4}{}", o.result.coefficients[i], stars(o.p_values[i])));
                    se.push(format!("({:.4})", o.result.std_errors[i]));
                }
                None => {
                    coef.push(String::new());
                    se.push(String::new());
                }
            }
        }
        push(n, coef);
        push("", se);
    }
    push("Fixed effects", outputs.iter().map(|o| fe_label(&o.spec)).collect());
    push("Cluster", outputs.iter().map(|o| format!("{:?}", o.result.cluster).to_lowercase()).collect());
    push("Sample", outputs.iter().map(|o| o.sample.clone().unwrap_or_else(|| "all".into())).collect());
    push("Observations", outputs.iter().map(|o| o.result.n.to_string()).collect());
    push("Adj. R2", outputs.iter().map(|o| format!("{:.4}", o.result.adj_r2)).collect());
    push("Within R2", outputs.iter().map(|o| format!("{:.4}", o.result.within_r2)).collect());
    let width = |j: usize| rows.iter().map(|r| r.get(j).map_or(0, |c| c.chars().count())).max().unwrap_or(0);
    let widths: Vec<usize> = (0..=outputs.len()).map(width).collect();
    let mut out = String::new();
    for r in &rows {
        let mut line = format!("{:<w$}", r[0], w = widths[0]);
        for (j, c) in r.iter().enumerate().skip(1) {
            let _ = write!(line, "  {:>w$}", c, w = widths[j]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str("Standard errors in parentheses. * p<0.10, ** p<0.05, *** p<0.01\n");
    for o in outputs.iter().filter(|o| !o.by_period.is_empty()) {
        let _ = writeln!(out, "\n{}: first regressor by period", o.name);
        for p in &o.by_period {
            let _ = writeln!(out, "  {:<10} n={:<6} coef={:>10.4} t={:>8.3}", p.period, p.n, p.coefficient, p.t_value);
        }
        if let Some(t) = &o.t_trend {
            let rt = t.robust_t.map_or("NA".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(out, "  t-value trend: slope={:.4} robust_t={rt} n={}", t.slope, t.n);
        }
    }
    out
}

/// Published sample means of bloat, shown next to the computed statistics.
pub fn reference_mean(kind: DocumentKind) -> f64 {
    match kind {
        DocumentKind::Mdna => 0.754,
        DocumentKind::CallTranscript => 0.685,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BloatStats {
    pub kind: DocumentKind,
    pub stats: Describe,
    pub reference_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Persistence {
    pub kind: DocumentKind,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incremental_r2: Option<Vec<IncrementalShare>>,
    /// Firm-FE R² of the field after removing time×industry means.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub firm_fe_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitions: Option<QuintileTransition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurement_error: Option<MeasurementError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawVsSummary {
    pub kind: DocumentKind,
    pub measure: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<Describe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Describe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetedRow {
    pub template_id: String,
    pub kind: DocumentKind,
    pub period: String,
    pub n: usize,
    pub share_nonempty: f64,
    /// Mean scaled length among non-empty targeted summaries.
    pub mean_scaled_len: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub bloat: Vec<BloatStats>,
    pub persistence: Vec<Persistence>,
    pub comparisons: Vec<RawVsSummary>,
    pub targeted: Vec<TargetedRow>,
    pub notes: Vec<String>,
}

pub struct ReportInputs<'a> {
    pub documents: &'a [Document],
    pub summaries: &'a [SummaryRecord],
    pub targeted: &'a [TargetedRecord],
    pub raw_metrics: &'a BTreeMap<String, MetricVector>,
    pub summary_metrics: &'a BTreeMap<String, MetricVector>,
    pub panel: &'a PanelTable,
    pub persistence_field: &'a str,
}

fn describe_opt(xs: &[f64], what: &str, notes: &mut Vec<String>) -> Option<Describe> {
    describe(xs).map_err(|e| notes.push(format!("{what}: {e}"))).ok()
}

pub fn build(inputs: &ReportInputs) -> Report {
    let mut report = Report::default();
    let docs: BTreeMap<&str, &Document> = inputs.documents.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let kinds: Vec<DocumentKind> = {
        let mut k: Vec<DocumentKind> = inputs.documents.iter().map(|d| d.kind).collect();
        k.sort();
        k.dedup();
        k
    };
    for &kind in &kinds {
        let values: Vec<f64> = inputs
            .summaries
            .iter()
            .filter(|s| docs.get(s.doc_id.as_str()).is_some_and(|d| d.kind == kind))
            .map(|s| s.bloat)
            .collect();
        if let Ok(stats) = describe(&values) {
            report.bloat.push(BloatStats { kind, stats, reference_mean: reference_mean(kind) });
        }
    }

    let field = inputs.persistence_field;
    for &kind in &kinds {
        let rows = inputs.panel.sample(Some(kind));
        if rows.is_empty() || inputs.panel.column(field).is_none() {
            continue;
        }
        let panel = match inputs.panel.to_core(&rows) {
            Ok(p) => p,
            Err(e) => {
                report.notes.push(format!("{} persistence: {e}", kind.as_str()));
                continue;
            }
        };
        let label = |what: &str| format!("{} {what} of {field}", kind.as_str());
        let mut note = |what: &str, e: bloat_core::Error| report.notes.push(format!("{}: {e}", label(what)));
        let sequence = vec![vec![FixedEffect::Time], vec![FixedEffect::Time, FixedEffect::Industry], vec![FixedEffect::TimeIndustry]];
        let incremental = incremental_r2(&panel, field, &sequence).map_err(|e| note("incremental R2", e)).ok();
        let fraction = firm_fe_fraction(&panel, field).map_err(|e| note("firm FE fraction", e)).ok();
        let transitions = quintile_transition(&panel, field).map_err(|e| note("quintile transitions", e)).ok();
        let me = measurement_error(&panel, field, DEFAULT_WEAK_INSTRUMENT_F).map_err(|e| note("measurement error", e)).ok();
        report.persistence.push(Persistence {
            kind,
            field: field.to_string(),
            incremental_r2: incremental,
            firm_fe_fraction: fraction,
            transitions,
            measurement_error: me,
        });
    }

    let summary_text: BTreeMap<&str, &str> = inputs.summaries.iter().map(|s| (s.doc_id.as_str(), s.text.as_str())).collect();
    let raw_sim = adjacent_similarity(inputs.documents.iter().map(|d| (d.firm_id.as_str(), d.kind, d.period.as_str(), d.text.as_str())));
    let summ_sim = adjacent_similarity(inputs.documents.iter().filter_map(|d| {
        summary_text.get(d.doc_id.as_str()).map(|t| (d.firm_id.as_str(), d.kind, d.period.as_str(), *t))
    }));
    for &kind in &kinds {
        let mut notes = Vec::new();
        let raw = raw_sim.get(&kind).and_then(|v| describe_opt(v, "similarity", &mut notes));
        let summary = summ_sim.get(&kind).and_then(|v| describe_opt(v, "similarity", &mut notes));
        if raw.is_some() || summary.is_some() {
            report.comparisons.push(RawVsSummary { kind, measure: "adjacent_cosine".into(), raw, summary });
        }
        for measure in ["boilerplate_pct", "fog", "plain_eng", "sentiment", "uncertainty"] {
            let pick = |m: &BTreeMap<String, MetricVector>| -> Vec<f64> {
                m.iter()
                    .filter(|(id, _)| docs.get(id.as_str()).is_some_and(|d| d.kind == kind))
                    .filter_map(|(_, v)| match measure {
                        "boilerplate_pct" => v.boilerplate_pct,
                        "fog" => v.fog,
                        "plain_eng" => v.plain_eng,
                        "sentiment" => v.sentiment,
                        _ => v.uncertainty,
                    })
                    .collect()
            };
            let raw = describe(&pick(inputs.raw_metrics)).ok();
            let summary = describe(&pick(inputs.summary_metrics)).ok();
            if raw.is_some() || summary.is_some() {
                report.comparisons.push(RawVsSummary { kind, measure: measure.into(), raw, summary });
            }
        }
    }

    let mut groups: BTreeMap<(&str, DocumentKind, &str), Vec<&TargetedRecord>> = BTreeMap::new();
    for t in inputs.targeted {
        if let Some(d) = docs.get(t.doc_id.as_str()) {
            groups.entry((t.template_id.as_str(), d.kind, d.period.as_str())).or_default().push(t);
        }
    }
    for ((template, kind, period), ts) in groups {
        let nonempty: Vec<f64> = ts.iter().filter(|t| t.nonempty).map(|t| t.scaled_len).collect();
        report.targeted.push(TargetedRow {
            template_id: template.to_string(),
            kind,
            period: period.to_string(),
            n: ts.len(),
            share_nonempty: nonempty.len() as f64 / ts.len() as f64,
            mean_scaled_len: mean(&nonempty),
        });
    }
    report
}

fn describe_line(out: &mut String, label: &str, d: &Describe) {
    let _ = writeln!(out, "{label:<16} {:>6} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}", d.n, d.mean, d.std, d.p25, d.p50, d.p75);
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header = |out: &mut String, label: &str| {
            let _ = writeln!(out, "{label:<16} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "N", "Mean", "Std", "P25", "P50", "P75");
        };
        out.push_str("Bloat\n");
        header(&mut out, "");
        for b in &self.bloat {
            describe_line(&mut out, b.kind.as_str(), &b.stats);
        }
        for b in &self.bloat {
            let _ = writeln!(out, "  reference mean ({}): {:.3}", b.kind.as_str(), b.reference_mean);
        }
        for p in &self.persistence {
            let _ = writeln!(out, "\nPersistence of {} ({})", p.field, p.kind.as_str());
            if let Some(shares) = &p.incremental_r2 {
                out.push_str("  Incremental R2 (%)\n");
                for s in shares {
                    let _ = writeln!(out, "    {:<16} {:>8.2}", s.label, s.share);
                }
            }
            if let Some(f) = p.firm_fe_fraction {
                let _ = writeln!(out, "  Firm FE fraction (after time x industry): {f:.4}");
            }
            if let Some(t) = &p.transitions {
                let _ = writeln!(out, "  Quintile transitions (%), {} period pairs", t.period_pairs);
                let _ = writeln!(out, "    {:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "from", "Q1", "Q2", "Q3", "Q4", "Q5");
                for (i, row) in t.matrix.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:>8.2}")).collect();
                    let _ = writeln!(out, "    {:>6} {}", format!("Q{}", i + 1), cells.join(" "));
                }
            }
            if let Some(m) = &p.measurement_error {
                let weak = if m.weak_instrument { " (weak instrument)" } else { "" };
                let _ = writeln!(
                    out,
                    "  Measurement error: {:.4} (OLS {:.4}, IV {:.4}, first-stage F {:.2}, n={}){weak}",
                    m.estimate, m.beta_ols, m.beta_iv, m.first_stage_f, m.n
                );
            }
        }
        if !self.comparisons.is_empty() {
            out.push_str("\nOriginal vs summary\n");
            header(&mut out, "");
            for c in &self.comparisons {
                let _ = writeln!(out, "{} {}", c.kind.as_str(), c.measure);
                if let Some(d) = &c.raw {
                    describe_line(&mut out, "  original", d);
                }
                if let Some(d) = &c.summary {
                    describe_line(&mut out, "  summary", d);
                }
            }
        }
        if !self.targeted.is_empty() {
            out.push_str("\nTargeted summaries\n");
            let _ = writeln!(out, "{:<12} {:<16} {:<10} {:>6} {:>10} {:>10}", "template", "kind", "period", "N", "nonempty", "scaled");
            for t in &self.targeted {
                let scaled = t.mean_scaled_len.map_or("NA".to_string(), |v| format!("{v:.3}"));
                let _ = writeln!(
                    out,
                    "{:<12} {:<16} {:<10} {:>6} {:>10.3} {:>10}",
                    t.template_id,
                    t.kind.as_str(),
                    t.period,
                    t.n,
                    t.share_nonempty,
                    scaled
                );
            }
        }
        if !self.notes.is_empty() {
            out.push_str("\nNotes\n");
            for n in &self.notes {
                let _ = writeln!(out, "  {n}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.009), "***");
        assert_eq!(stars(0.04), "**");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.2), "");
        assert_eq!(stars(f64::NAN), "");
    }

    #[test]
    fn p_values_match_normal_limit() {
        assert!((p_value(1.959964, 1e7) - 0.05).abs() < 1e-5);
        assert!((p_value(0.0, 10.0) - 1.0).abs() < 1e-12);
        assert!(p_value(2.0, 0.0).is_nan());
        // t with 1 df is Cauchy: P(|T| > 1) = 1/2.
        assert!((p_value(1.0, 1.0) - 0.5).abs() < 1e-9);
    }

    fn table() -> PanelTable {
        let mut t = PanelTable::new(vec!["y".into(), "x".into()]);
        for f in 0..6 {
            for p in 0..4 {
                let x = ((f * 7 + p * 3) % 5) as f64;
                let y = 2.0 * x + f as f64 + 0.1 * ((f + p) % 3) as f64;
                t.rows.push(PanelRow {
                    firm_id: format!("F{f}"),
                    time_id: format!("{}", 2018 + p),
                    industry_id: format!("I{}", f % 3),
                    doc_id: format!("F{f}_{p}"),
                    kind: "MDNA".into(),
                    values: vec![Some(y), Some(x)],
                });
            }
        }
        t
    }

    #[test]
    fn fits_and_renders() {
        let block = RegressionBlock {
            dep: "y".into(),
            regressors: vec!["x".into()],
            fe: vec!["time".into(), "industry".into()],
            cluster: "firm".into(),
            winsor: Default::default(),
            sample: Some("MDNA".into()),
            by_period: true,
            drop_singletons: true,
        };
        let out = fit(&table(), "m", &block).unwrap();
        let (b, _, _) = out.result.coefficient("x").unwrap();
        assert!((b - 2.0).abs() < 0.1);
        assert_eq!(out.by_period.len(), 4);
        assert!(out.t_trend.is_some());
        let text = regression_table(&[out]);
        assert!(text.contains("Observations"));
        assert!(text.contains("(1)"));
        assert!(text.contains("t-value trend"));
    }

    #[test]
    fn unknown_field_is_a_schema_error() {
        let block = RegressionBlock {
            dep: "missing".into(),
            regressors: vec![],
            fe: vec![],
            cluster: "none".into(),
            winsor: Default::default(),
            sample: None,
            by_period: false,
            drop_singletons: true,
        };
        assert!(matches!(fit(&table(), "m", &block), Err(Error::Schema { column, .. }) if column == "missing"));
    }
}
