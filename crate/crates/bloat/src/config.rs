//! Pipeline configuration (TOML).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bloat_core::econometrics::{Cluster, FixedEffect, RegressionSpec};
use bloat_core::market::{Consensus, SpreadWeighting};
use bloat_core::metrics::PlainEnglishMode;
use bloat_core::summarizer::{Granularity, LengthUnit, UtilityParams};
use bloat_core::text::DEFAULT_MAX_CHUNK_TOKENS;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::remote::RemoteConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Reference,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// CSV `doc_id,firm_id,period,kind,path`.
    pub manifest: Option<PathBuf>,
    /// Alternative to a manifest: a directory of `<firm>_<period>[_call].txt` files.
    pub documents_dir: Option<PathBuf>,
    pub lexicon_dir: Option<PathBuf>,
    pub prompt_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub returns: Option<PathBuf>,
    pub trades: Option<PathBuf>,
    pub quotes: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub earnings: Option<PathBuf>,
    pub estimates: Option<PathBuf>,
    /// Precomputed daily spreads `firm_id,date,spread`; quoted spreads from
    /// `quotes` are used when absent.
    pub spreads: Option<PathBuf>,
    /// One ISO date per line.
    pub holidays: Option<PathBuf>,
    /// Extra panel fields `firm_id,time_id,industry_id,<field...>`.
    pub controls: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub max_chunk_tokens: usize,
    /// Run Item 7 extraction on MD&A inputs (full 10-K filings).
    pub extract_item7: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { max_chunk_tokens: DEFAULT_MAX_CHUNK_TOKENS, extract_item7: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummarizerConfig {
    pub granularity: Granularity,
    pub unit: LengthUnit,
    pub benefit_slope: f64,
    pub cost_slope: f64,
    pub embedding_dim: usize,
    pub key_dim: usize,
    pub value_dim: usize,
    /// Multiplier on the seeded projection weights.
    pub weight_scale: f64,
    /// Template for the unconstrained summary.
    pub prompt: String,
    /// Targeted templates run on the unconstrained summaries.
    pub targeted: Vec<String>,
}

impl Default for SummarizerConfig {
    fn default() -> Self {
        SummarizerConfig {
            granularity: Granularity::Token,
            unit: LengthUnit::Words,
            benefit_slope: 1.0,
            cost_slope: 1.0,
            embedding_dim: 16,
            key_dim: 8,
            value_dim: 8,
            weight_scale: 3.0,
            prompt: "summarize".into(),
            targeted: vec!["financial".into(), "esg".into()],
        }
    }
}

impl SummarizerConfig {
    pub fn utility(&self) -> Result<UtilityParams> {
        Ok(UtilityParams::linear(self.benefit_slope, self.cost_slope)?)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub plain_english: PlainEnglishMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    /// Trading calendar bounds; weekdays minus holidays. Defaults to the
    /// span of the returns file.
    pub calendar_start: Option<NaiveDate>,
    pub calendar_end: Option<NaiveDate>,
    pub car_windows: Vec<(i64, i64)>,
    pub post_vol_window: (i64, i64),
    pub pre_vol_window: (i64, i64),
    pub min_obs: usize,
    /// Trading-day offsets whose order flow feeds the PIN estimate.
    pub pin_window: (i64, i64),
    pub pin_min_days: usize,
    pub pin_starts: usize,
    pub pin_symmetric: bool,
    pub quote_lag: i64,
    pub spread_weighting: SpreadWeighting,
    pub consensus: Consensus,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            calendar_start: None,
            calendar_end: None,
            car_windows: vec![(0, 1), (0, 4), (0, 14), (0, 29)],
            post_vol_window: bloat_core::market::POST_VOL_WINDOW,
            pre_vol_window: bloat_core::market::PRE_VOL_WINDOW,
            min_obs: 15,
            pin_window: (-250, -1),
            pin_min_days: 20,
            pin_starts: 20,
            pin_symmetric: false,
            quote_lag: bloat_core::market::DEFAULT_QUOTE_LAG,
            spread_weighting: SpreadWeighting::TimeWeighted,
            consensus: Consensus::Median,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Winsor {
    /// `true` winsorizes the dependent variable and every regressor.
    All(bool),
    Fields(Vec<String>),
}

impl Default for Winsor {
    fn default() -> Self {
        Winsor::All(false)
    }
}

/// A `[regression.<name>]` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionBlock {
    pub dep: String,
    #[serde(default)]
    pub regressors: Vec<String>,
    #[serde(default)]
    pub fe: Vec<String>,
    #[serde(default = "default_cluster")]
    pub cluster: String,
    #[serde(default)]
    pub winsor: Winsor,
    /// Restrict to one document kind (`MDNA` or `CallTranscript`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<String>,
    /// Also fit the model period by period and trend the t-value of the
    /// first regressor over time.
    #[serde(default)]
    pub by_period: bool,
    #[serde(default = "yes")]
    pub drop_singletons: bool,
}

fn default_cluster() -> String {
    "industry".into()
}

fn yes() -> bool {
    true
}

impl RegressionBlock {
    pub fn to_spec(&self, name: &str) -> Result<RegressionSpec> {
        let fixed_effects = self
            .fe
            .iter()
            .map(|f| FixedEffect::parse(f).ok_or_else(|| Error::Config(format!("regression.{name}: unknown fe {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if fixed_effects.contains(&FixedEffect::Firm) && fixed_effects.contains(&FixedEffect::Industry) {
            return Err(Error::Config(format!("regression.{name}: firm and industry effects cannot both be absorbed")));
        }
        let cluster = Cluster::parse(&self.cluster)
            .ok_or_else(|| Error::Config(format!("regression.{name}: unknown cluster {:?}", self.cluster)))?;
        let winsor = match &self.winsor {
            Winsor::All(false) => Vec::new(),
            Winsor::All(true) => std::iter::once(&self.dep).chain(&self.regressors).cloned().collect(),
            Winsor::Fields(f) => f.clone(),
        };
        Ok(RegressionSpec {
            dependent: self.dep.clone(),
            regressors: self.regressors.clone(),
            fixed_effects,
            cluster,
            winsor,
            drop_singletons: self.drop_singletons,
            ..Default::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Panel field for the variance decomposition, transitions and
    /// measurement-error estimate.
    pub persistence_field: String,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { persistence_field: "bloat".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub mode: Mode,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub paths: Paths,
    pub corpus: CorpusConfig,
    pub summarizer: SummarizerConfig,
    pub remote: RemoteConfig,
    pub metrics: MetricsConfig,
    pub market: MarketConfig,
    pub regression: BTreeMap<String, RegressionBlock>,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            mode: Mode::Reference,
            jobs: 0,
            paths: Paths { output_dir: "out".into(), ..Default::default() },
            corpus: CorpusConfig::default(),
            summarizer: SummarizerConfig::default(),
            remote: RemoteConfig::default(),
            metrics: MetricsConfig::default(),
            market: MarketConfig::default(),
            regression: BTreeMap::new(),
            report: ReportConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Parses a config file and resolves relative paths against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        let fix = |x: &mut PathBuf| {
            if x.is_relative() {
                *x = base.join(&*x);
            }
        };
        fix(&mut p.output_dir);
        for x in [
            &mut p.manifest,
            &mut p.documents_dir,
            &mut p.lexicon_dir,
            &mut p.prompt_dir,
            &mut p.returns,
            &mut p.trades,
            &mut p.quotes,
            &mut p.events,
            &mut p.earnings,
            &mut p.estimates,
            &mut p.spreads,
            &mut p.holidays,
            &mut p.controls,
        ]
        .into_iter()
        .flatten()
        {
            fix(x);
        }
    }

    /// Checks that referenced inputs exist and that settings are coherent.
    pub fn validate(&self) -> Result<()> {
        let p = &self.paths;
        if p.manifest.is_none() && p.documents_dir.is_none() {
            return Err(Error::Config("paths.manifest or paths.documents_dir is required".into()));
        }
        let inputs = [
            ("manifest", &p.manifest),
            ("documents_dir", &p.documents_dir),
            ("lexicon_dir", &p.lexicon_dir),
            ("prompt_dir", &p.prompt_dir),
            ("returns", &p.returns),
            ("trades", &p.trades),
            ("quotes", &p.quotes),
            ("events", &p.events),
            ("earnings", &p.earnings),
            ("estimates", &p.estimates),
            ("spreads", &p.spreads),
            ("holidays", &p.holidays),
            ("controls", &p.controls),
        ];
        for (name, path) in inputs {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(Error::Config(format!("paths.{name}: {} does not exist", path.display())));
                }
            }
        }
        if p.lexicon_dir.is_none() {
            return Err(Error::Config("paths.lexicon_dir is required".into()));
        }
        if self.corpus.max_chunk_tokens == 0 {
            return Err(Error::Config("corpus.max_chunk_tokens must be positive".into()));
        }
        self.summarizer.utility()?;
        if self.summarizer.embedding_dim == 0 || self.summarizer.key_dim == 0 || self.summarizer.value_dim == 0 {
            return Err(Error::Config("summarizer dimensions must be positive".into()));
        }
        for (name, block) in &self.regression {
            block.to_spec(name)?;
            if let Some(s) = &block.sample {
                if bloat_core::text::DocumentKind::parse(s).is_none() {
                    return Err(Error::Config(format!("regression.{name}: unknown sample {s:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Stable digest of a serializable config section.
    pub fn digest<T: Serialize>(section: &T) -> String {
        crate::io::sha256_hex(&serde_json::to_vec(section).expect("section serializes"))
    }
}
