//! The long panel table: `firm_id,time_id,industry_id,doc_id,kind,<field...>`.

use std::collections::BTreeMap;
use std::path::Path;

use bloat_core::econometrics::Panel;
use bloat_core::text::DocumentKind;

use crate::csvio::Table;
use crate::io::fmt_opt;
use crate::{Error, Result};

pub const ID_COLUMNS: [&str; 3] = ["firm_id", "time_id", "industry_id"];
const TEXT_COLUMNS: [&str; 2] = ["doc_id", "kind"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PanelRow {
    pub firm_id: String,
    pub time_id: String,
    pub industry_id: String,
    pub doc_id: String,
    pub kind: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PanelTable {
    pub fields: Vec<String>,
    pub rows: Vec<PanelRow>,
}

impl PanelTable {
    pub fn new(fields: Vec<String>) -> Self {
        PanelTable { fields, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("firm_id,time_id,industry_id,doc_id,kind");
        for f in &self.fields {
            out.push(',');
            out.push_str(f);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&[r.firm_id.as_str(), &r.time_id, &r.industry_id, &r.doc_id, &r.kind].join(","));
            for v in &r.values {
                out.push(',');
                out.push_str(&fmt_opt(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Reads a panel CSV. Only the three id columns are required; `doc_id`
    /// and `kind` are optional text columns and everything else is numeric
    /// with `NA` for missing.
    pub fn read(path: &Path) -> Result<Self> {
        let t = Table::read(path, &ID_COLUMNS)?;
        let fields: Vec<String> = t
            .headers
            .iter()
            .filter(|h| !ID_COLUMNS.contains(&h.as_str()) && !TEXT_COLUMNS.contains(&h.as_str()))
            .cloned()
            .collect();
        let mut table = PanelTable::new(fields);
        for (i, r) in t.rows.iter().enumerate() {
            let text = |c: &str| if t.has(c) { t.get(r, c).to_string() } else { String::new() };
            let values = table.fields.iter().map(|f| t.opt_f64(i, f)).collect::<Result<Vec<_>>>()?;
            table.rows.push(PanelRow {
                firm_id: text("firm_id"),
                time_id: text("time_id"),
                industry_id: text("industry_id"),
                doc_id: text("doc_id"),
                kind: text("kind"),
                values,
            });
        }
        Ok(table)
    }

    /// Rows of one document kind, or all rows.
    pub fn sample(&self, kind: Option<DocumentKind>) -> Vec<&PanelRow> {
        self.rows
            .iter()
            .filter(|r| kind.is_none_or(|k| DocumentKind::parse(&r.kind) == Some(k)))
            .collect()
    }

    /// Builds an estimation panel from a subset of rows.
    pub fn to_core(&self, rows: &[&PanelRow]) -> Result<Panel> {
        let mut p = Panel::new(
            rows.iter().map(|r| r.firm_id.clone()).collect(),
            rows.iter().map(|r| r.time_id.clone()).collect(),
            rows.iter().map(|r| r.industry_id.clone()).collect(),
        )
        .map_err(|e| Error::Config(format!("panel: {e}")))?;
        for (j, f) in self.fields.iter().enumerate() {
            p.add_field(f.clone(), rows.iter().map(|r| r.values[j]).collect())?;
        }
        Ok(p)
    }
}

/// Controls keyed by `(firm_id, time_id)`: industry plus numeric fields.
#[derive(Debug, Clone, Default)]
pub struct Controls {
    pub fields: Vec<String>,
    pub rows: BTreeMap<(String, String), (String, Vec<Option<f64>>)>,
}

impl Controls {
    pub fn read(path: &Path) -> Result<Self> {
        let t = PanelTable::read(path)?;
        let mut c = Controls { fields: t.fields.clone(), rows: BTreeMap::new() };
        for r in t.rows {
            c.rows.insert((r.firm_id, r.time_id), (r.industry_id, r.values));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = PanelTable::new(vec!["bloat".into(), "car_0_1".into()]);
        t.rows.push(PanelRow {
            firm_id: "A".into(),
            time_id: "2020".into(),
            industry_id: "10".into(),
            doc_id: "A_2020".into(),
            kind: "MDNA".into(),
            values: vec![Some(0.75), None],
        });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.csv");
        std::fs::write(&path, t.to_csv()).unwrap();
        assert_eq!(PanelTable::read(&path).unwrap(), t);
        let core = t.to_core(&t.sample(Some(DocumentKind::Mdna))).unwrap();
        assert_eq!(core.field("car_0_1").unwrap(), &[None]);
        assert!(t.sample(Some(DocumentKind::CallTranscript)).is_empty());
    }

    #[test]
    fn missing_id_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "firm_id,time_id,x\nA,1,2\n").unwrap();
        match PanelTable::read(&path) {
            Err(Error::Schema { column, .. }) => assert_eq!(column, "industry_id"),
            other => panic!("{other:?}"),
        }
    }
}
