//! Filing ingest: Item 7 extraction, cleaning, segmentation and the
//! newline-delimited JSON document store.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use bloat_core::text::{clean_text, Document, DocumentKind, Segmenter, Span};
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Item 7 headings, tried in order: arabic with and without a separator,
/// then roman with and without.
static ITEM7: LazyLock<[Regex; 4]> = LazyLock::new(|| {
    [
        r"(?im)^[ \t]*item[ \t]*7[ \t]*[.:\-][^\n]*$",
        r"(?im)^[ \t]*item[ \t]*7\b[ \t]+[a-z][^\n]*$",
        r"(?im)^[ \t]*item[ \t]*vii[ \t]*[.:\-][^\n]*$",
        r"(?im)^[ \t]*item[ \t]*vii\b[ \t]+[a-z][^\n]*$",
    ]
    .map(|p| Regex::new(p).unwrap())
});

static END: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?im)^[ \t]*item[ \t]*(?:7[ \t]*a|8|vii[ \t]*a|viii)\b").unwrap());

static CROSS_REFERENCE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)incorporated\s+(?:herein\s+)?by\s+reference|https?://|\bsee\s+exhibit\b").unwrap());

/// Bodies shorter than this that only point elsewhere count as missing.
const MIN_BODY_WORDS: usize = 40;

/// Extracts the Item 7 body of a 10-K: the text after the heading line up
/// to the next Item 7A or Item 8 heading.
///
/// Markup is cleaned first. Filings repeat headings in their table of
/// contents, so every heading of the first matching pattern is tried and the
/// longest body wins.
pub fn extract_mdna(raw: &str) -> Result<String> {
    let text = clean_text(raw, DocumentKind::Mdna);
    let ends: Vec<usize> = END.find_iter(&text).map(|m| m.start()).collect();
    let Some(pattern) = ITEM7.iter().find(|p| p.is_match(&text)) else {
        return Err(Error::NotFound);
    };
    let body = pattern
        .find_iter(&text)
        .map(|h| {
            let end = ends.iter().copied().find(|&e| e >= h.end()).unwrap_or(text.len());
            text[h.end()..end].trim()
        })
        .max_by_key(|b| b.len())
        .unwrap_or("");
    let words = bloat_core::text::words(body).count();
    if words == 0 || (words < MIN_BODY_WORDS && CROSS_REFERENCE.is_match(body)) {
        return Err(Error::NotFound);
    }
    Ok(body.to_string())
}

/// One row of `doc_id,firm_id,period,kind,path`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub doc_id: String,
    pub firm_id: String,
    pub period: String,
    pub kind: String,
    pub path: PathBuf,
}

pub const MANIFEST_COLUMNS: [&str; 5] = ["doc_id", "firm_id", "period", "kind", "path"];

/// Reads a manifest; relative paths resolve against its directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(Error::csv(path))?;
    let headers = rdr.headers().map_err(Error::csv(path))?.clone();
    for column in MANIFEST_COLUMNS {
        if !headers.iter().any(|h| h == column) {
            return Err(Error::Schema { path: path.into(), column: column.into() });
        }
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        let mut row: ManifestRow = row.map_err(Error::csv(path))?;
        if row.path.is_relative() {
            row.path = base.join(&row.path);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Builds manifest rows from a directory of `.txt`/`.htm`/`.html` files named
/// `<firm>_<period>.ext` (MD&A) or `<firm>_<period>_call.ext` (transcript).
/// Files are taken in name order.
pub fn scan_directory(dir: &Path) -> Result<Vec<ManifestRow>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(Error::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("txt" | "htm" | "html")))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let parts: Vec<&str> = stem.split('_').collect();
            let (firm, period, kind) = match parts.as_slice() {
                [firm, period] => (*firm, *period, "MDNA"),
                [firm, period, k] if DocumentKind::parse(k) == Some(DocumentKind::CallTranscript) => {
                    (*firm, *period, "CallTranscript")
                }
                _ => {
                    return Err(Error::Config(format!(
                        "{}: file names must look like <firm>_<period>[_call]",
                        path.display()
                    )))
                }
            };
            Ok(ManifestRow { doc_id: stem.clone(), firm_id: firm.into(), period: period.into(), kind: kind.into(), path })
        })
        .collect()
}

/// A stored document: cleaned text plus its segmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub firm_id: String,
    pub period: String,
    pub kind: DocumentKind,
    pub text: String,
    pub sentence_spans: Vec<(usize, usize)>,
    pub token_count: usize,
}

impl DocumentRecord {
    pub fn from_document(doc: &Document) -> Self {
        DocumentRecord {
            doc_id: doc.doc_id.clone(),
            firm_id: doc.firm_id.clone(),
            period: doc.period.clone(),
            kind: doc.kind,
            text: doc.text.clone(),
            sentence_spans: doc.sentences.iter().map(|s| (s.start, s.end)).collect(),
            token_count: doc.token_count,
        }
    }

    /// Re-segments the stored text; the spans come out identical for the
    /// same segmenter.
    pub fn to_document(&self, segmenter: &Segmenter) -> Document {
        let doc = Document::new(&self.doc_id, &self.firm_id, &self.period, self.kind, self.text.as_str(), segmenter);
        debug_assert_eq!(doc.sentences, self.sentence_spans.iter().map(|&(s, e)| Span::new(s, e)).collect::<Vec<_>>());
        doc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestFailure {
    pub doc_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub total: usize,
    pub retrieved: usize,
    pub failures: Vec<IngestFailure>,
    pub tokens: usize,
}

impl IngestReport {
    pub fn summary_line(&self) -> String {
        let pct = if self.total == 0 { 0.0 } else { 100.0 * self.retrieved as f64 / self.total as f64 };
        format!("retrieved={}/{} ({pct:.2}%)", self.retrieved, self.total)
    }
}

/// Reads, cleans and segments one manifest row. MD&A rows go through Item 7
/// extraction when `extract_item7` is set.
pub fn load_row(row: &ManifestRow, extract_item7: bool, segmenter: &Segmenter) -> Result<Document> {
    let kind = DocumentKind::parse(&row.kind)
        .ok_or_else(|| Error::Config(format!("{}: unknown kind {:?}", row.doc_id, row.kind)))?;
    let bytes = fs::read(&row.path).map_err(Error::io(&row.path))?;
    let raw = String::from_utf8_lossy(&bytes);
    let text = match kind {
        DocumentKind::Mdna if extract_item7 => extract_mdna(&raw)?,
        _ => clean_text(&raw, kind),
    };
    Ok(Document::new(&row.doc_id, &row.firm_id, &row.period, kind, text, segmenter))
}

/// Loads every row in parallel, keeping manifest order and collecting
/// per-document failures.
pub fn ingest(rows: &[ManifestRow], extract_item7: bool) -> (Vec<Document>, IngestReport) {
    let results: Vec<Result<Document>> = rows
        .par_iter()
        .map_init(Segmenter::default, |seg, row| load_row(row, extract_item7, seg))
        .collect();
    let mut docs = Vec::new();
    let mut failures = Vec::new();
    for (row, r) in rows.iter().zip(results) {
        match r {
            Ok(d) => docs.push(d),
            Err(e) => {
                tracing::warn!(doc_id = %row.doc_id, "ingest failed: {e}");
                failures.push(IngestFailure { doc_id: row.doc_id.clone(), error: e.to_string() });
            }
        }
    }
    let report = IngestReport {
        total: rows.len(),
        retrieved: docs.len(),
        tokens: docs.iter().map(|d| d.token_count).sum(),
        failures,
    };
    (docs, report)
}

pub fn write_store(path: &Path, docs: &[Document]) -> Result<()> {
    let mut out = Vec::new();
    for d in docs {
        serde_json::to_writer(&mut out, &DocumentRecord::from_document(d))?;
        out.push(b'\n');
    }
    crate::io::write_atomic(path, &out)
}

pub fn read_store(path: &Path) -> Result<Vec<DocumentRecord>> {
    let file = fs::File::open(path).map_err(Error::io(path))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { path: path.into(), line: i + 1, message: e.to_string() })?;
        records.push(rec);
    }
    Ok(records)
}

pub fn load_documents(path: &Path) -> Result<Vec<Document>> {
    let segmenter = Segmenter::default();
    Ok(read_store(path)?.iter().map(|r| r.to_document(&segmenter)).collect())
}
