//! Prompt templates: a TOML front-matter block between `+++` lines, then
//! the prompt text.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const DEFAULTS: [(&str, &str); 5] = [
    ("summarize.txt", include_str!("../prompts/summarize.txt")),
    ("financial.txt", include_str!("../prompts/financial.txt")),
    ("esg.txt", include_str!("../prompts/esg.txt")),
    ("deletion_baseline.txt", include_str!("../prompts/deletion_baseline.txt")),
    ("deletion_reasons.txt", include_str!("../prompts/deletion_reasons.txt")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    /// Unconstrained summary of one chunk.
    Summary,
    /// Theme-restricted summary that answers `NA` when the theme is absent.
    Targeted,
    /// Original and summarized text side by side.
    Comparison,
    /// No document input.
    Standalone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "one")]
    pub top_p: f64,
    #[serde(default)]
    pub presence_penalty: f64,
    #[serde(default)]
    pub frequency_penalty: f64,
}

fn default_temperature() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

impl Default for PromptParams {
    fn default() -> Self {
        PromptParams { max_tokens: None, temperature: 0.5, top_p: 1.0, presence_penalty: 0.0, frequency_penalty: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub template_id: String,
    pub kind: TemplateKind,
    pub text: String,
    pub params: PromptParams,
}

#[derive(Deserialize)]
struct FrontMatter {
    template_id: String,
    #[serde(default = "summary_kind")]
    kind: TemplateKind,
    #[serde(flatten)]
    params: PromptParams,
}

fn summary_kind() -> TemplateKind {
    TemplateKind::Summary
}

impl PromptTemplate {
    pub fn parse(source: &str) -> Result<Self> {
        let source = source.replace("\r\n", "\n");
        let rest = source
            .strip_prefix("+++\n")
            .ok_or_else(|| Error::Config("prompt template must start with a +++ front-matter line".into()))?;
        let (front, body) = rest
            .split_once("\n+++\n")
            .ok_or_else(|| Error::Config("prompt front matter is not closed by +++".into()))?;
        let fm: FrontMatter = toml::from_str(front).map_err(|e| Error::Config(format!("prompt front matter: {e}")))?;
        let text = body.strip_suffix('\n').unwrap_or(body).to_string();
        let t = PromptTemplate { template_id: fm.template_id, kind: fm.kind, text, params: fm.params };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let count = |p: &str| self.text.matches(p).count();
        let expected: &[(&str, usize)] = match self.kind {
            TemplateKind::Summary | TemplateKind::Targeted => &[("{chunk}", 1), ("{chunk1}", 0), ("{chunk2}", 0)],
            TemplateKind::Comparison => &[("{chunk}", 0), ("{chunk1}", 1), ("{chunk2}", 1)],
            TemplateKind::Standalone => &[("{chunk}", 0), ("{chunk1}", 0), ("{chunk2}", 0)],
        };
        for (placeholder, n) in expected {
            if count(placeholder) != *n {
                return Err(Error::Config(format!(
                    "template {:?} must contain {placeholder} exactly {n} time(s)",
                    self.template_id
                )));
            }
        }
        if !(0.0..=2.0).contains(&self.params.temperature) || !(0.0..=1.0).contains(&self.params.top_p) {
            return Err(Error::Config(format!("template {:?}: temperature or top_p out of range", self.template_id)));
        }
        Ok(())
    }

    pub fn render(&self, chunk: &str) -> String {
        self.text.replace("{chunk}", chunk)
    }

    pub fn render_pair(&self, original: &str, summary: &str) -> String {
        self.text.replace("{chunk1}", original).replace("{chunk2}", summary)
    }
}

/// Templates by id.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptSet {
    pub templates: BTreeMap<String, PromptTemplate>,
}

impl PromptSet {
    pub fn defaults() -> Self {
        let templates = DEFAULTS
            .iter()
            .map(|(_, src)| {
                let t = PromptTemplate::parse(src).expect("bundled prompt is valid");
                (t.template_id.clone(), t)
            })
            .collect();
        PromptSet { templates }
    }

    /// Defaults overlaid with every `*.txt` template in `dir`.
    pub fn load(dir: Option<&Path>) -> Result<Self> {
        let mut set = Self::defaults();
        let Some(dir) = dir else { return Ok(set) };
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(Error::io(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "txt"))
            .collect();
        paths.sort();
        for p in paths {
            let t = PromptTemplate::parse(&crate::io::read_to_string(&p)?)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            set.templates.insert(t.template_id.clone(), t);
        }
        Ok(set)
    }

    pub fn get(&self, id: &str) -> Result<&PromptTemplate> {
        self.templates.get(id).ok_or_else(|| Error::Config(format!("unknown prompt template {id:?}")))
    }

    /// Stable digest of every template, for cache keys.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(&self.templates).expect("templates serialize");
        crate::io::sha256_hex(&json)
    }
}
