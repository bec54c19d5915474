use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Firm-period observations with named numeric fields. `None` marks a
/// missing value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    firm_ids: Vec<String>,
    time_ids: Vec<String>,
    industry_ids: Vec<String>,
    fields: BTreeMap<String, Vec<Option<f64>>>,
    industry_varies: bool,
}

impl Panel {
    /// Keys must have equal lengths and unique `(firm, time)` pairs.
    pub fn new(firm_ids: Vec<String>, time_ids: Vec<String>, industry_ids: Vec<String>) -> Result<Self> {
        if firm_ids.len() != time_ids.len() || firm_ids.len() != industry_ids.len() {
            return Err(Error::InvalidParameter(String::from("panel key columns differ in length")));
        }
        let mut seen = BTreeSet::new();
        let mut industry_of: BTreeMap<&str, &str> = BTreeMap::new();
        let mut industry_varies = false;
        for ((f, t), ind) in firm_ids.iter().zip(&time_ids).zip(&industry_ids) {
            if !seen.insert((f.as_str(), t.as_str())) {
                return Err(Error::InvalidParameter(alloc::format!("duplicate observation for firm {f} at {t}")));
            }
            if *industry_of.entry(f).or_insert(ind) != ind.as_str() {
                industry_varies = true;
            }
        }
        Ok(Panel { firm_ids, time_ids, industry_ids, fields: BTreeMap::new(), industry_varies })
    }

    /// Adds or replaces a field. Non-finite values are stored as missing.
    pub fn add_field(&mut self, name: impl Into<String>, values: Vec<Option<f64>>) -> Result<()> {
        let name = name.into();
        if values.len() != self.len() {
            return Err(Error::InvalidParameter(alloc::format!("field {name} has {} values for {} rows", values.len(), self.len())));
        }
        let values = values.into_iter().map(|v| v.filter(|x| x.is_finite())).collect();
        self.fields.insert(name, values);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.firm_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.firm_ids.is_empty()
    }

    pub fn field(&self, name: &str) -> Result<&[Option<f64>]> {
        self.fields.get(name).map(Vec::as_slice).ok_or_else(|| Error::UnknownField(String::from(name)))
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.fields.keys().map(String::as_str)
    }

    pub fn firm_ids(&self) -> &[String] {
        &self.firm_ids
    }

    pub fn time_ids(&self) -> &[String] {
        &self.time_ids
    }

    pub fn industry_ids(&self) -> &[String] {
        &self.industry_ids
    }

    /// Industry differs across observations of at least one firm.
    pub fn industry_varies_within_firm(&self) -> bool {
        self.industry_varies
    }

    /// Distinct periods in chronological order: numeric when every id
    /// parses as an integer, lexicographic otherwise.
    pub fn periods(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.time_ids.iter().collect();
        let mut periods: Vec<String> = set.into_iter().cloned().collect();
        if periods.iter().all(|p| p.trim().parse::<i64>().is_ok()) {
            periods.sort_by_key(|p| p.trim().parse::<i64>().unwrap_or(0));
        }
        periods
    }

    /// Row index of each `(firm, time)` pair.
    pub fn index(&self) -> BTreeMap<(&str, &str), usize> {
        self.firm_ids
            .iter()
            .zip(&self.time_ids)
            .enumerate()
            .map(|(i, (f, t))| ((f.as_str(), t.as_str()), i))
            .collect()
    }
}
