//! Stage orchestration, artifact layout and stage caching.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use bloat_core::metrics::MetricVector;
use bloat_core::text::Document;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, PipelineConfig};
use crate::corpus::{self, IngestReport};
use crate::io::{sha256_file, sha256_hex, write_atomic};
use crate::market::{self, MarketData};
use crate::panel::{Controls, PanelRow, PanelTable};
use crate::prompts::PromptSet;
use crate::remote::RemoteClient;
use crate::report::{self, RegressionOutput, ReportInputs};
use crate::summaries::{self, Summarizer, SummaryFailure, SummaryRecord, TargetedRecord};
use crate::textmetrics::{self, METRIC_COLUMNS};
use crate::{Error, Result};

pub const DOCUMENTS: &str = "documents.jsonl";
pub const INGEST_REPORT: &str = "ingest_report.json";
pub const SUMMARIES: &str = "summaries.jsonl";
pub const TARGETED: &str = "targeted.jsonl";
pub const SUMMARY_FAILURES: &str = "summary_failures.json";
pub const METRICS: &str = "metrics.csv";
pub const SUMMARY_METRICS: &str = "summary_metrics.csv";
pub const MARKET: &str = "market.csv";
pub const PANEL: &str = "panel.csv";
pub const RESULTS: &str = "results";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const MANIFEST: &str = "manifest.json";
const CACHE: &str = ".cache";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Summarize,
    Metrics,
    Market,
    Panel,
    Regress,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Ingest, Stage::Summarize, Stage::Metrics, Stage::Market, Stage::Panel, Stage::Regress, Stage::Report];

    pub fn name(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Summarize => "summarize",
            Stage::Metrics => "metrics",
            Stage::Market => "market",
            Stage::Panel => "panel",
            Stage::Regress => "regress",
            Stage::Report => "report",
        }
    }
}

/// What a stage did; also the content of its cache stamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageStatus {
    pub stage: Stage,
    pub key: String,
    #[serde(default)]
    pub cached: bool,
    /// Some items failed but the stage produced output.
    pub partial: bool,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub stages: Vec<StageStatus>,
}

impl RunSummary {
    pub fn partial(&self) -> bool {
        self.stages.iter().any(|s| s.partial)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.partial())
    }
}

/// Hashes a list of labelled parts into a cache key.
fn key_of(parts: &[(&str, String)]) -> String {
    let mut buf = format!("version={}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in parts {
        buf.push_str(k);
        buf.push('=');
        buf.push_str(v);
        buf.push('\n');
    }
    sha256_hex(buf.as_bytes())
}

fn file_hash(path: &Path) -> String {
    sha256_file(path).unwrap_or_else(|_| "missing".into())
}

fn dir_hash(dir: &Path) -> String {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect())
        .unwrap_or_default();
    entries.sort();
    let parts: Vec<String> = entries
        .iter()
        .map(|p| format!("{}:{}", p.file_name().unwrap_or_default().to_string_lossy(), file_hash(p)))
        .collect();
    sha256_hex(parts.join("\n").as_bytes())
}

pub struct Pipeline {
    pub cfg: PipelineConfig,
    out: PathBuf,
    remote: Option<RemoteClient>,
}

impl Pipeline {
    /// Validates the configuration. Remote mode needs `API_KEY` whenever
    /// summaries are requested; the check happens here, before any stage
    /// runs.
    pub fn new(cfg: PipelineConfig, stages: &[Stage]) -> Result<Self> {
        cfg.validate()?;
        let remote = if cfg.mode == Mode::Remote && stages.contains(&Stage::Summarize) {
            let mut rc = cfg.remote.clone();
            if cfg.jobs > 0 {
                rc.concurrency = rc.concurrency.min(cfg.jobs);
            }
            Some(RemoteClient::from_env(rc)?)
        } else {
            None
        };
        Ok(Pipeline { out: cfg.paths.output_dir.clone(), cfg, remote })
    }

    /// Uses an explicit client instead of reading `API_KEY`.
    pub fn with_client(cfg: PipelineConfig, client: RemoteClient) -> Result<Self> {
        cfg.validate()?;
        Ok(Pipeline { out: cfg.paths.output_dir.clone(), cfg, remote: Some(client) })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn require(&self, name: &str, stage: Stage) -> Result<PathBuf> {
        let p = self.path(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(Error::Config(format!("{} not found; run the {} stage first", p.display(), stage.name())))
        }
    }

    fn stamp_path(&self, stage: Stage) -> PathBuf {
        self.out.join(CACHE).join(format!("{}.json", stage.name()))
    }

    fn cached(&self, stage: Stage, key: &str, outputs: &[&str]) -> Option<StageStatus> {
        if !outputs.iter().all(|o| self.path(o).exists()) {
            return None;
        }
        let text = fs::read_to_string(self.stamp_path(stage)).ok()?;
        let mut status: StageStatus = serde_json::from_str(&text).ok()?;
        (status.key == key).then(|| {
            status.cached = true;
            status
        })
    }

    fn stamp(&self, status: &StageStatus) -> Result<()> {
        write_atomic(&self.stamp_path(status.stage), &serde_json::to_vec_pretty(status)?)
    }

    /// Runs the stages in pipeline order, reusing cached outputs whose
    /// inputs and configuration are unchanged, then writes the resolved
    /// config and the artifact manifest.
    pub fn run(&self, stages: &[Stage]) -> Result<RunSummary> {
        let mut stages = stages.to_vec();
        stages.sort();
        stages.dedup();
        self.check_inputs(&stages)?;
        fs::create_dir_all(&self.out).map_err(Error::io(&self.out))?;
        let mut summary = RunSummary::default();
        for stage in stages {
            let (key, outputs) = self.stage_key(stage)?;
            let status = match self.cached(stage, &key, &outputs) {
                Some(s) => {
                    tracing::info!(stage = stage.name(), "cached");
                    s
                }
                None => {
                    tracing::info!(stage = stage.name(), "running");
                    let (partial, message) = self.execute(stage)?;
                    let s = StageStatus { stage, key, cached: false, partial, message };
                    self.stamp(&s)?;
                    s
                }
            };
            summary.stages.push(status);
        }
        write_atomic(&self.path(RESOLVED_CONFIG), self.cfg.to_toml().as_bytes())?;
        self.write_manifest()?;
        Ok(summary)
    }

    /// Header check of every input table the stages will read, so a
    /// misnamed column stops the run before any work.
    fn check_inputs(&self, stages: &[Stage]) -> Result<()> {
        let p = &self.cfg.paths;
        let mut tables: Vec<(&Option<PathBuf>, &[&str])> = Vec::new();
        if stages.contains(&Stage::Ingest) {
            tables.push((&p.manifest, &corpus::MANIFEST_COLUMNS));
        }
        if stages.contains(&Stage::Market) {
            tables.extend([
                (&p.returns, &market::RETURNS_COLUMNS[..]),
                (&p.trades, &market::TRADES_COLUMNS[..]),
                (&p.quotes, &market::QUOTES_COLUMNS[..]),
                (&p.spreads, &market::SPREADS_COLUMNS[..]),
                (&p.events, &market::EVENTS_COLUMNS[..]),
                (&p.earnings, &market::EARNINGS_COLUMNS[..]),
                (&p.estimates, &market::ESTIMATES_COLUMNS[..]),
            ]);
        }
        if stages.contains(&Stage::Panel) {
            tables.push((&p.controls, &crate::panel::ID_COLUMNS));
        }
        for (path, columns) in tables {
            if let Some(path) = path {
                crate::csvio::check_header(path, columns)?;
            }
        }
        Ok(())
    }

    fn documents_hash(&self) -> String {
        file_hash(&self.path(DOCUMENTS))
    }

    fn stage_key(&self, stage: Stage) -> Result<(String, Vec<&'static str>)> {
        let cfg = &self.cfg;
        Ok(match stage {
            Stage::Ingest => {
                let rows = self.manifest_rows()?;
                let files: Vec<String> = rows
                    .iter()
                    .map(|r| format!("{},{},{},{},{}", r.doc_id, r.firm_id, r.period, r.kind, file_hash(&r.path)))
                    .collect();
                let key = key_of(&[("corpus", PipelineConfig::digest(&cfg.corpus)), ("rows", sha256_hex(files.join("\n").as_bytes()))]);
                (key, vec![DOCUMENTS, INGEST_REPORT])
            }
            Stage::Summarize => {
                let mut parts = vec![
                    ("documents", self.documents_hash()),
                    ("summarizer", PipelineConfig::digest(&cfg.summarizer)),
                    ("max_chunk_tokens", cfg.corpus.max_chunk_tokens.to_string()),
                    ("mode", format!("{:?}", cfg.mode)),
                ];
                match cfg.mode {
                    Mode::Reference => {
                        parts.push(("seed", cfg.seed.to_string()));
                        parts.push(("lexicon", cfg.paths.lexicon_dir.as_deref().map_or_else(String::new, dir_hash)));
                    }
                    Mode::Remote => {
                        let mut remote = cfg.remote.clone();
                        remote.concurrency = 0;
                        parts.push(("remote", PipelineConfig::digest(&remote)));
                        parts.push(("prompts", PromptSet::load(cfg.paths.prompt_dir.as_deref())?.digest()));
                    }
                }
                (key_of(&parts), vec![SUMMARIES, TARGETED, SUMMARY_FAILURES])
            }
            Stage::Metrics => {
                let key = key_of(&[
                    ("documents", self.documents_hash()),
                    ("summaries", file_hash(&self.path(SUMMARIES))),
                    ("lexicon", cfg.paths.lexicon_dir.as_deref().map_or_else(String::new, dir_hash)),
                    ("metrics", PipelineConfig::digest(&cfg.metrics)),
                ]);
                (key, vec![METRICS, SUMMARY_METRICS])
            }
            Stage::Market => {
                let p = &cfg.paths;
                let inputs = [&p.returns, &p.trades, &p.quotes, &p.spreads, &p.events, &p.earnings, &p.estimates, &p.holidays];
                let files: Vec<String> = inputs.iter().map(|x| x.as_deref().map_or_else(|| "none".into(), file_hash)).collect();
                let key = key_of(&[
                    ("documents", self.documents_hash()),
                    ("inputs", files.join(",")),
                    ("market", PipelineConfig::digest(&cfg.market)),
                ]);
                (key, vec![MARKET])
            }
            Stage::Panel => {
                let key = key_of(&[
                    ("documents", self.documents_hash()),
                    ("summaries", file_hash(&self.path(SUMMARIES))),
                    ("targeted", file_hash(&self.path(TARGETED))),
                    ("metrics", file_hash(&self.path(METRICS))),
                    ("summary_metrics", file_hash(&self.path(SUMMARY_METRICS))),
                    ("market", file_hash(&self.path(MARKET))),
                    ("controls", cfg.paths.controls.as_deref().map_or_else(|| "none".into(), file_hash)),
                ]);
                (key, vec![PANEL])
            }
            Stage::Regress => {
                let key = key_of(&[("panel", file_hash(&self.path(PANEL))), ("regression", PipelineConfig::digest(&cfg.regression))]);
                (key, vec![RESULTS])
            }
            Stage::Report => {
                let key = key_of(&[
                    ("documents", self.documents_hash()),
                    ("summaries", file_hash(&self.path(SUMMARIES))),
                    ("targeted", file_hash(&self.path(TARGETED))),
                    ("metrics", file_hash(&self.path(METRICS))),
                    ("summary_metrics", file_hash(&self.path(SUMMARY_METRICS))),
                    ("panel", file_hash(&self.path(PANEL))),
                    ("report", PipelineConfig::digest(&cfg.report)),
                ]);
                (key, vec![REPORT_JSON, REPORT_TXT])
            }
        })
    }

    fn execute(&self, stage: Stage) -> Result<(bool, String)> {
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Summarize => self.summarize(),
            Stage::Metrics => self.metrics(),
            Stage::Market => self.market(),
            Stage::Panel => self.panel(),
            Stage::Regress => self.regress(),
            Stage::Report => self.report(),
        }
    }

    fn manifest_rows(&self) -> Result<Vec<corpus::ManifestRow>> {
        let rows = match (&self.cfg.paths.manifest, &self.cfg.paths.documents_dir) {
            (Some(m), _) => corpus::read_manifest(m)?,
            (None, Some(d)) => corpus::scan_directory(d)?,
            (None, None) => return Err(Error::Config("paths.manifest or paths.documents_dir is required".into())),
        };
        if rows.is_empty() {
            return Err(Error::Config("the document manifest lists no documents".into()));
        }
        Ok(rows)
    }

    fn ingest(&self) -> Result<(bool, String)> {
        let rows = self.manifest_rows()?;
        let (docs, report) = corpus::ingest(&rows, self.cfg.corpus.extract_item7);
        corpus::write_store(&self.path(DOCUMENTS), &docs)?;
        write_atomic(&self.path(INGEST_REPORT), &serde_json::to_vec_pretty(&report)?)?;
        if report.retrieved == 0 {
            return Err(Error::Stage(format!("no document could be ingested ({})", report.summary_line())));
        }
        Ok((false, report.summary_line()))
    }

    pub fn load_documents(&self) -> Result<Vec<Document>> {
        corpus::load_documents(&self.require(DOCUMENTS, Stage::Ingest)?)
    }

    pub fn ingest_report(&self) -> Result<IngestReport> {
        Ok(serde_json::from_slice(&fs::read(self.path(INGEST_REPORT)).map_err(Error::io(self.path(INGEST_REPORT)))?)?)
    }

    fn summarize(&self) -> Result<(bool, String)> {
        let docs = self.load_documents()?;
        let cfg = &self.cfg;
        let prompts;
        let how = match (&self.remote, cfg.mode) {
            (Some(client), _) => {
                prompts = PromptSet::load(cfg.paths.prompt_dir.as_deref())?;
                Summarizer::Remote { client, prompts: &prompts }
            }
            (None, Mode::Remote) => return Err(Error::Config("remote mode needs a client".into())),
            (None, Mode::Reference) => {
                let dir = cfg.paths.lexicon_dir.as_deref().expect("validated");
                Summarizer::Reference { seed: cfg.seed, themes: summaries::load_themes(dir, &cfg.summarizer.targeted)? }
            }
        };
        let out = summaries::run(&docs, &cfg.summarizer, cfg.corpus.max_chunk_tokens, &how)?;
        write_atomic(&self.path(SUMMARIES), &summaries::to_jsonl(&out.summaries)?)?;
        write_atomic(&self.path(TARGETED), &summaries::to_jsonl(&out.targeted)?)?;
        write_atomic(&self.path(SUMMARY_FAILURES), &serde_json::to_vec_pretty(&out.failures)?)?;
        let message = format!(
            "summarized={}/{} targeted={} failures={} retries={}",
            out.summaries.len(),
            docs.len(),
            out.targeted.len(),
            out.failures.len(),
            out.retries
        );
        Ok((!out.failures.is_empty(), message))
    }

    pub fn load_summaries(&self) -> Result<Vec<SummaryRecord>> {
        summaries::read_jsonl(&self.require(SUMMARIES, Stage::Summarize)?)
    }

    pub fn load_targeted(&self) -> Result<Vec<TargetedRecord>> {
        summaries::read_jsonl(&self.require(TARGETED, Stage::Summarize)?)
    }

    pub fn load_summary_failures(&self) -> Result<Vec<SummaryFailure>> {
        let p = self.require(SUMMARY_FAILURES, Stage::Summarize)?;
        Ok(serde_json::from_slice(&fs::read(&p).map_err(Error::io(&p))?)?)
    }

    fn metrics(&self) -> Result<(bool, String)> {
        let docs = self.load_documents()?;
        let summaries = self.load_summaries()?;
        let lexicon = crate::lexicon::load_lexicon(self.cfg.paths.lexicon_dir.as_deref().expect("validated"))?;
        let texts: Vec<(String, String)> = summaries.iter().map(|s| (s.doc_id.clone(), s.text.clone())).collect();
        let (raw, summ) = textmetrics::compute(&docs, &texts, &lexicon, self.cfg.metrics.plain_english)?;
        let order: Vec<String> = docs.iter().map(|d| d.doc_id.clone()).collect();
        write_atomic(&self.path(METRICS), textmetrics::to_csv(&raw, &order).as_bytes())?;
        write_atomic(&self.path(SUMMARY_METRICS), textmetrics::to_csv(&summ, &order).as_bytes())?;
        Ok((false, format!("documents={} summaries={}", raw.len(), summ.len())))
    }

    fn market(&self) -> Result<(bool, String)> {
        let docs = self.load_documents()?;
        let data = MarketData::load(&self.cfg.paths)?;
        let rows = if data.events.is_empty() {
            Vec::new()
        } else {
            let periods: BTreeMap<String, String> = docs.iter().map(|d| (d.doc_id.clone(), d.period.clone())).collect();
            market::compute(&data, &self.cfg.market, &periods)?
        };
        write_atomic(&self.path(MARKET), market::to_csv(&rows, &self.cfg.market).as_bytes())?;
        Ok((false, format!("events={}", rows.len())))
    }

    fn panel(&self) -> Result<(bool, String)> {
        let table = self.build_panel()?;
        write_atomic(&self.path(PANEL), table.to_csv().as_bytes())?;
        Ok((false, format!("rows={} fields={}", table.rows.len(), table.fields.len())))
    }

    /// One row per summarized document: bloat, metrics of the original and
    /// of the summary, targeted-summary measures, market outcomes and
    /// controls.
    pub fn build_panel(&self) -> Result<PanelTable> {
        let docs = self.load_documents()?;
        let summaries: BTreeMap<String, SummaryRecord> =
            self.load_summaries()?.into_iter().map(|s| (s.doc_id.clone(), s)).collect();
        let targeted = self.load_targeted()?;
        let raw = textmetrics::read_csv(&self.require(METRICS, Stage::Metrics)?)?;
        let summ = textmetrics::read_csv(&self.require(SUMMARY_METRICS, Stage::Metrics)?)?;
        let (market_fields, market) = if self.path(MARKET).exists() {
            market::read_csv(&self.path(MARKET))?
        } else {
            (Vec::new(), BTreeMap::new())
        };
        let controls = match &self.cfg.paths.controls {
            Some(p) => Controls::read(p)?,
            None => Controls::default(),
        };
        let mut templates: Vec<&str> = targeted.iter().map(|t| t.template_id.as_str()).collect();
        templates.sort();
        templates.dedup();
        let mut targeted_by: BTreeMap<(&str, &str), &TargetedRecord> = BTreeMap::new();
        for t in &targeted {
            targeted_by.insert((t.doc_id.as_str(), t.template_id.as_str()), t);
        }

        let mut fields: Vec<String> = vec!["bloat".into(), "n".into(), "n_star".into()];
        fields.extend(METRIC_COLUMNS.iter().map(|c| c.to_string()));
        fields.extend(METRIC_COLUMNS.iter().map(|c| format!("sum_{c}")));
        for t in &templates {
            fields.push(format!("{t}_nonempty"));
            fields.push(format!("{t}_len"));
        }
        fields.extend(market_fields.iter().cloned());
        fields.extend(controls.fields.iter().cloned());
        let mut table = PanelTable::new(fields);

        let firm_industry: BTreeMap<&str, &str> =
            controls.rows.iter().map(|((f, _), (ind, _))| (f.as_str(), ind.as_str())).collect();
        let metric_values = |m: Option<&MetricVector>| -> Vec<Option<f64>> {
            match m {
                Some(v) => vec![Some(v.length as f64), v.sentiment, v.uncertainty, v.fog, v.plain_eng, v.boilerplate_pct],
                None => vec![None; METRIC_COLUMNS.len()],
            }
        };
        for d in &docs {
            let Some(s) = summaries.get(&d.doc_id) else { continue };
            let mut values = vec![Some(s.bloat), Some(s.n as f64), Some(s.n_star as f64)];
            values.extend(metric_values(raw.get(&d.doc_id)));
            values.extend(metric_values(summ.get(&d.doc_id)));
            for t in &templates {
                match targeted_by.get(&(d.doc_id.as_str(), *t)) {
                    Some(r) => values.extend([Some(f64::from(u8::from(r.nonempty))), r.nonempty.then_some(r.scaled_len)]),
                    None => values.extend([None, None]),
                }
            }
            let m = market.get(&d.doc_id);
            values.extend(market_fields.iter().map(|f| m.and_then(|m| m.get(f).copied().flatten())));
            let key = (d.firm_id.clone(), d.period.clone());
            let (industry, control_values) = match controls.rows.get(&key) {
                Some((ind, v)) => (ind.clone(), v.clone()),
                None => (
                    firm_industry.get(d.firm_id.as_str()).map_or("unknown", |v| v).to_string(),
                    vec![None; controls.fields.len()],
                ),
            };
            values.extend(control_values);
            table.rows.push(PanelRow {
                firm_id: d.firm_id.clone(),
                time_id: d.period.clone(),
                industry_id: industry,
                doc_id: d.doc_id.clone(),
                kind: d.kind.as_str().to_string(),
                values,
            });
        }
        Ok(table)
    }

    pub fn load_panel(&self) -> Result<PanelTable> {
        PanelTable::read(&self.require(PANEL, Stage::Panel)?)
    }

    fn regress(&self) -> Result<(bool, String)> {
        let table = self.load_panel()?;
        let dir = self.path(RESULTS);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(Error::io(&dir))?;
        }
        fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
        let fitted: Vec<(&String, Result<RegressionOutput>)> = {
            use rayon::prelude::*;
            let blocks: Vec<_> = self.cfg.regression.iter().collect();
            blocks.into_par_iter().map(|(name, b)| (name, report::fit(&table, name, b))).collect()
        };
        let mut ok = Vec::new();
        let mut failed = BTreeMap::new();
        for (name, r) in fitted {
            match r {
                Ok(o) => {
                    write_atomic(&dir.join(format!("{name}.json")), &serde_json::to_vec_pretty(&o)?)?;
                    ok.push(o);
                }
                Err(e @ Error::Schema { .. }) => return Err(e),
                Err(e) => {
                    tracing::warn!(regression = %name, "regression failed: {e}");
                    failed.insert(name.clone(), e.to_string());
                }
            }
        }
        write_atomic(&dir.join("regressions.txt"), report::regression_table(&ok).as_bytes())?;
        write_atomic(&dir.join("failures.json"), &serde_json::to_vec_pretty(&failed)?)?;
        Ok((!failed.is_empty(), format!("fitted={} failed={}", ok.len(), failed.len())))
    }

    fn report(&self) -> Result<(bool, String)> {
        let documents = self.load_documents()?;
        let summaries = self.load_summaries()?;
        let targeted = self.load_targeted()?;
        let raw_metrics = textmetrics::read_csv(&self.require(METRICS, Stage::Metrics)?)?;
        let summary_metrics = textmetrics::read_csv(&self.require(SUMMARY_METRICS, Stage::Metrics)?)?;
        let panel = self.load_panel()?;
        let r = report::build(&ReportInputs {
            documents: &documents,
            summaries: &summaries,
            targeted: &targeted,
            raw_metrics: &raw_metrics,
            summary_metrics: &summary_metrics,
            panel: &panel,
            persistence_field: &self.cfg.report.persistence_field,
        });
        write_atomic(&self.path(REPORT_JSON), &serde_json::to_vec_pretty(&r)?)?;
        write_atomic(&self.path(REPORT_TXT), r.to_text().as_bytes())?;
        Ok((false, format!("notes={}", r.notes.len())))
    }

    /// `manifest.json`: sha256 of every artifact under the output
    /// directory, keyed by relative path.
    pub fn artifact_hashes(&self) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        let mut stack = vec![self.out.clone()];
        while let Some(dir) = stack.pop() {
            for e in fs::read_dir(&dir).map_err(Error::io(&dir))? {
                let p = e.map_err(Error::io(&dir))?.path();
                let rel = p.strip_prefix(&self.out).expect("under output dir").to_string_lossy().replace('\\', "/");
                if rel == CACHE || rel == MANIFEST || rel.ends_with(".tmp") {
                    continue;
                }
                if p.is_dir() {
                    stack.push(p);
                } else {
                    out.insert(rel, sha256_file(&p)?);
                }
            }
        }
        Ok(out)
    }

    fn write_manifest(&self) -> Result<()> {
        write_atomic(&self.path(MANIFEST), &serde_json::to_vec_pretty(&self.artifact_hashes()?)?)
    }
}
