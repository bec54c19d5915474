use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::winsor::winsorize;
use super::Panel;
use crate::linalg::{cholesky, cholesky_inverse, cholesky_solve, dot, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedEffect {
    Time,
    Industry,
    Firm,
    #[serde(alias = "time*industry", alias = "time_x_industry")]
    TimeIndustry,
}

impl FixedEffect {
    pub fn as_str(&self) -> &'static str {
        match self {
            FixedEffect::Time => "time",
            FixedEffect::Industry => "industry",
            FixedEffect::Firm => "firm",
            FixedEffect::TimeIndustry => "time_industry",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "time" | "year" | "period" => Some(FixedEffect::Time),
            "industry" => Some(FixedEffect::Industry),
            "firm" => Some(FixedEffect::Firm),
            "time_industry" | "time*industry" | "time_x_industry" | "industry*time" => Some(FixedEffect::TimeIndustry),
            _ => None,
        }
    }

    fn key(&self, panel: &Panel, row: usize) -> String {
        match self {
            FixedEffect::Time => panel.time_ids()[row].clone(),
            FixedEffect::Industry => panel.industry_ids()[row].clone(),
            FixedEffect::Firm => panel.firm_ids()[row].clone(),
            FixedEffect::TimeIndustry => alloc::format!("{}\u{1f}{}", panel.time_ids()[row], panel.industry_ids()[row]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cluster {
    /// Classical homoskedastic standard errors.
    None,
    /// Each observation is its own cluster.
    Observation,
    Firm,
    Time,
    #[default]
    Industry,
}

impl Cluster {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "" => Some(Cluster::None),
            "observation" | "obs" | "robust" => Some(Cluster::Observation),
            "firm" => Some(Cluster::Firm),
            "time" | "year" | "period" => Some(Cluster::Time),
            "industry" => Some(Cluster::Industry),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionSpec {
    pub dependent: String,
    pub regressors: Vec<String>,
    pub fixed_effects: Vec<FixedEffect>,
    pub cluster: Cluster,
    /// Fields winsorized over the estimation sample before fitting.
    pub winsor: Vec<String>,
    pub winsor_bounds: (f64, f64),
    pub drop_singletons: bool,
    /// Scale cluster-robust variances by `G/(G−1)·(N−1)/(N−K)`.
    pub small_sample: bool,
}

impl Default for RegressionSpec {
    fn default() -> Self {
        RegressionSpec {
            dependent: String::new(),
            regressors: Vec::new(),
            fixed_effects: Vec::new(),
            cluster: Cluster::Industry,
            winsor: Vec::new(),
            winsor_bounds: (0.01, 0.99),
            drop_singletons: true,
            small_sample: true,
        }
    }
}

impl RegressionSpec {
    pub fn new(dependent: impl Into<String>, regressors: &[&str], fixed_effects: &[FixedEffect]) -> Self {
        RegressionSpec {
            dependent: dependent.into(),
            regressors: regressors.iter().map(|r| String::from(*r)).collect(),
            fixed_effects: fixed_effects.to_vec(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub dependent: String,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub n: usize,
    /// Regressors plus absorbed fixed-effect degrees of freedom.
    pub k: usize,
    pub r2: f64,
    pub adj_r2: f64,
    pub within_r2: f64,
    /// Groups per absorbed dimension; `constant` when none is absorbed.
    pub absorbed: Vec<(String, usize)>,
    pub absorbed_dof: usize,
    pub dropped_singletons: usize,
    pub clusters: Option<usize>,
    pub cluster: Cluster,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<(f64, f64, f64)> {
        let i = self.names.iter().position(|n| n == name)?;
        Some((self.coefficients[i], self.std_errors[i], self.t_values[i]))
    }

    pub fn df_resid(&self) -> usize {
        self.n - self.k
    }
}

/// Compact group codes for `rows` under one dimension.
fn codes_for(keys: &[String]) -> (Vec<usize>, usize) {
    let mut map: BTreeMap<&str, usize> = BTreeMap::new();
    let codes = keys
        .iter()
        .map(|k| {
            let next = map.len();
            *map.entry(k.as_str()).or_insert(next)
        })
        .collect();
    (codes, map.len())
}

fn union_find_root(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Fixed-effect dimensions over a fixed sample, ready to demean columns.
#[derive(Debug, Clone)]
pub(crate) struct Absorber {
    /// Dimensions that no other included dimension refines.
    dims: Vec<(Vec<usize>, Vec<f64>)>,
    pub(crate) groups: Vec<(String, usize)>,
    pub(crate) dof: usize,
}

impl Absorber {
    /// `keys[d][i]` is row `i`'s group label in dimension `d`. With no
    /// dimensions a single constant is absorbed.
    pub(crate) fn new(labels: &[&str], keys: &[Vec<String>]) -> Self {
        let coded: Vec<(Vec<usize>, usize)> = keys.iter().map(|k| codes_for(k)).collect();
        let groups = labels.iter().zip(&coded).map(|(l, c)| (String::from(*l), c.1)).collect();
        let refines = |fine: &(Vec<usize>, usize), coarse: &(Vec<usize>, usize)| {
            let mut map = alloc::vec![usize::MAX; fine.1];
            fine.0.iter().zip(&coarse.0).all(|(&f, &c)| {
                if map[f] == usize::MAX {
                    map[f] = c;
                }
                map[f] == c
            })
        };
        let mut keep = Vec::new();
        for (a, ca) in coded.iter().enumerate() {
            let redundant = coded.iter().enumerate().any(|(b, cb)| {
                b != a && refines(cb, ca) && (!refines(ca, cb) || b < a)
            });
            if !redundant {
                keep.push(a);
            }
        }
        let dof = match keep.as_slice() {
            [] => 1,
            [a] => coded[*a].1,
            [a, b] => {
                let (ga, gb) = (coded[*a].1, coded[*b].1);
                let mut parent: Vec<usize> = (0..ga + gb).collect();
                for (&x, &y) in coded[*a].0.iter().zip(&coded[*b].0) {
                    let (rx, ry) = (union_find_root(&mut parent, x), union_find_root(&mut parent, ga + y));
                    if rx != ry {
                        parent[rx] = ry;
                    }
                }
                let components = (0..ga + gb).filter(|&i| union_find_root(&mut parent, i) == i).count();
                ga + gb - components
            }
            many => many.iter().map(|&d| coded[d].1).sum::<usize>() - (many.len() - 1),
        };
        let dims = keep
            .into_iter()
            .map(|d| {
                let (codes, g) = coded[d].clone();
                let mut counts = alloc::vec![0.0; g];
                for &c in &codes {
                    counts[c] += 1.0;
                }
                (codes, counts)
            })
            .collect();
        Absorber { dims, groups, dof }
    }

    /// Subtracts group means, alternating over dimensions until the largest
    /// adjustment falls below `1e-10` relative to the column scale.
    pub(crate) fn demean(&self, v: &mut [f64]) -> Result<()> {
        if self.dims.is_empty() {
            let m = v.iter().sum::<f64>() / v.len().max(1) as f64;
            v.iter_mut().for_each(|x| *x -= m);
            return Ok(());
        }
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        let single = self.dims.len() == 1;
        for _ in 0..10_000 {
            let mut largest = 0.0f64;
            for (codes, counts) in &self.dims {
                let mut sums = alloc::vec![0.0; counts.len()];
                for (x, &c) in v.iter().zip(codes) {
                    sums[c] += x;
                }
                for (s, n) in sums.iter_mut().zip(counts) {
                    *s /= n;
                    largest = largest.max(s.abs());
                }
                for (x, &c) in v.iter_mut().zip(codes) {
                    *x -= sums[c];
                }
            }
            if single || largest < 1e-10 * scale {
                return Ok(());
            }
        }
        Err(Error::DidNotConverge)
    }
}

/// Listwise-complete rows for `fields`.
pub(crate) fn complete_rows(columns: &[&[Option<f64>]], n: usize) -> Vec<usize> {
    (0..n).filter(|&i| columns.iter().all(|c| c[i].is_some())).collect()
}

pub(crate) fn fe_keys(panel: &Panel, fes: &[FixedEffect], rows: &[usize]) -> Vec<Vec<String>> {
    fes.iter().map(|fe| rows.iter().map(|&r| fe.key(panel, r)).collect()).collect()
}

/// Drops rows that are alone in their group in any dimension, repeatedly.
fn drop_singletons(panel: &Panel, fes: &[FixedEffect], rows: Vec<usize>) -> Vec<usize> {
    let mut rows = rows;
    loop {
        let keys = fe_keys(panel, fes, &rows);
        let mut singleton = alloc::vec![false; rows.len()];
        for dim in &keys {
            let mut count: BTreeMap<&str, usize> = BTreeMap::new();
            for k in dim {
                *count.entry(k.as_str()).or_default() += 1;
            }
            for (s, k) in singleton.iter_mut().zip(dim) {
                *s |= count[k.as_str()] == 1;
            }
        }
        if !singleton.iter().any(|s| *s) {
            return rows;
        }
        rows = rows.into_iter().zip(singleton).filter(|(_, s)| !s).map(|(r, _)| r).collect();
    }
}

fn cluster_codes(panel: &Panel, cluster: Cluster, rows: &[usize]) -> Option<(Vec<usize>, usize)> {
    let keys: Vec<String> = match cluster {
        Cluster::None => return None,
        Cluster::Observation => return Some(((0..rows.len()).collect(), rows.len())),
        Cluster::Firm => rows.iter().map(|&r| panel.firm_ids()[r].clone()).collect(),
        Cluster::Time => rows.iter().map(|&r| panel.time_ids()[r].clone()).collect(),
        Cluster::Industry => rows.iter().map(|&r| panel.industry_ids()[r].clone()).collect(),
    };
    Some(codes_for(&keys))
}

/// Least squares with absorbed fixed effects and cluster-robust standard
/// errors. Rows missing the dependent or any regressor are dropped.
pub fn ols_fe(panel: &Panel, spec: &RegressionSpec) -> Result<RegressionResult> {
    if spec.regressors.is_empty() {
        return Err(Error::InvalidParameter(String::from("regression needs at least one regressor")));
    }
    let y_col = panel.field(&spec.dependent)?;
    let x_cols = spec.regressors.iter().map(|r| panel.field(r)).collect::<Result<Vec<_>>>()?;
    let mut all: Vec<&[Option<f64>]> = alloc::vec![y_col];
    all.extend(x_cols.iter().copied());
    let mut rows = complete_rows(&all, panel.len());

    let extract = |col: &[Option<f64>], rows: &[usize]| -> Vec<f64> { rows.iter().map(|&r| col[r].unwrap_or(f64::NAN)).collect() };
    // Winsorize on the listwise sample, then carry values through any row drops.
    let mut values: Vec<Vec<f64>> = all.iter().map(|c| extract(c, &rows)).collect();
    let names: Vec<&str> = core::iter::once(spec.dependent.as_str()).chain(spec.regressors.iter().map(String::as_str)).collect();
    for (name, v) in names.iter().zip(values.iter_mut()) {
        if spec.winsor.iter().any(|w| w == name) && !v.is_empty() {
            *v = winsorize(v, spec.winsor_bounds.0, spec.winsor_bounds.1)?;
        }
    }
    let n_before = rows.len();
    if spec.drop_singletons && !spec.fixed_effects.is_empty() {
        let kept = drop_singletons(panel, &spec.fixed_effects, rows.clone());
        let mut keep_iter = kept.iter().peekable();
        let mask: Vec<bool> = rows
            .iter()
            .map(|r| {
                let hit = keep_iter.peek() == Some(&r);
                if hit {
                    keep_iter.next();
                }
                hit
            })
            .collect();
        for v in values.iter_mut() {
            *v = v.iter().zip(&mask).filter(|(_, m)| **m).map(|(x, _)| *x).collect();
        }
        rows = kept;
    }
    let dropped_singletons = n_before - rows.len();
    let n = rows.len();
    let p = spec.regressors.len();

    let labels: Vec<&str> = spec.fixed_effects.iter().map(FixedEffect::as_str).collect();
    let absorber = Absorber::new(&labels, &fe_keys(panel, &spec.fixed_effects, &rows));
    let k = p + absorber.dof;
    if n <= k {
        return Err(Error::InsufficientData(alloc::format!("{n} observations for {k} parameters")));
    }

    let mut y = values.remove(0);
    let mut xs = values;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    absorber.demean(&mut y)?;
    for (x, name) in xs.iter_mut().zip(&spec.regressors) {
        let m = x.iter().sum::<f64>() / n as f64;
        let raw_ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
        absorber.demean(x)?;
        let ss = dot(x, x);
        if ss <= 1e-10 * raw_ss || raw_ss == 0.0 {
            return Err(Error::RankDeficient(name.clone()));
        }
    }

    let mut xtx = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..=i {
            let v = dot(&xs[i], &xs[j]);
            xtx[(i, j)] = v;
            xtx[(j, i)] = v;
        }
    }
    let xty: Vec<f64> = xs.iter().map(|x| dot(x, &y)).collect();
    let l = cholesky(&xtx, 1e-10).map_err(|j| Error::RankDeficient(spec.regressors[j].clone()))?;
    let beta = cholesky_solve(&l, &xty);
    let resid: Vec<f64> = (0..n).map(|r| y[r] - xs.iter().zip(&beta).map(|(x, b)| x[r] * b).sum::<f64>()).collect();
    let ssr = dot(&resid, &resid);
    let within_tss = dot(&y, &y);
    let bread = cholesky_inverse(&l);

    let (variance, clusters) = match cluster_codes(panel, spec.cluster, &rows) {
        None => {
            let s2 = ssr / (n - k) as f64;
            let mut v = bread.clone();
            for i in 0..p {
                for j in 0..p {
                    v[(i, j)] *= s2;
                }
            }
            (v, None)
        }
        Some((codes, g)) => {
            if g < 2 {
                return Err(Error::TooFewClusters(g));
            }
            let mut scores = alloc::vec![alloc::vec![0.0; p]; g];
            for r in 0..n {
                for (j, x) in xs.iter().enumerate() {
                    scores[codes[r]][j] += x[r] * resid[r];
                }
            }
            let mut meat = Matrix::zeros(p, p);
            for u in &scores {
                for i in 0..p {
                    for j in 0..p {
                        meat[(i, j)] += u[i] * u[j];
                    }
                }
            }
            let mut v = bread.matmul(&meat).matmul(&bread);
            if spec.small_sample {
                let c = g as f64 / (g - 1) as f64 * (n - 1) as f64 / (n - k) as f64;
                for i in 0..p {
                    for j in 0..p {
                        v[(i, j)] *= c;
                    }
                }
            }
            (v, Some(g))
        }
    };
    let std_errors: Vec<f64> = (0..p).map(|i| libm::sqrt(variance[(i, i)].max(0.0))).collect();
    let t_values = beta.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let r2 = if tss > 0.0 { 1.0 - ssr / tss } else { 0.0 };
    let adj_r2 = 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - k) as f64;
    let within_r2 = if within_tss > 0.0 { 1.0 - ssr / within_tss } else { 0.0 };
    let absorbed = if spec.fixed_effects.is_empty() { alloc::vec![(String::from("constant"), 1)] } else { absorber.groups.clone() };
    Ok(RegressionResult {
        dependent: spec.dependent.clone(),
        names: spec.regressors.clone(),
        coefficients: beta,
        std_errors,
        t_values,
        n,
        k,
        r2,
        adj_r2,
        within_r2,
        absorbed,
        absorbed_dof: absorber.dof,
        dropped_singletons,
        clusters,
        cluster: spec.cluster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn panel(rows: &[(&str, &str, &str, f64, f64)]) -> Panel {
        let mut p = Panel::new(
            rows.iter().map(|r| String::from(r.0)).collect(),
            rows.iter().map(|r| String::from(r.1)).collect(),
            rows.iter().map(|r| String::from(r.2)).collect(),
        )
        .unwrap();
        p.add_field("y", rows.iter().map(|r| Some(r.3)).collect()).unwrap();
        p.add_field("x", rows.iter().map(|r| Some(r.4)).collect()).unwrap();
        p
    }

    fn noiseless() -> Panel {
        noiseless_in(["m", "m", "n", "n"])
    }

    fn noiseless_in(inds: [&str; 4]) -> Panel {
        let mut rows = Vec::new();
        let firms = ["a", "b", "c", "d"];
        let effects = [1.0, -3.0, 0.5, 7.0];
        let years = ["1", "2", "3"];
        let mut names = Vec::new();
        for (fi, f) in firms.iter().enumerate() {
            for (ti, t) in years.iter().enumerate() {
                names.push((fi, ti, *f, *t));
            }
        }
        for (fi, ti, f, t) in names {
            let x = (fi * 3 + ti * ti) as f64 * 0.5 + if ti == 1 { fi as f64 } else { 0.0 };
            rows.push((f, t, inds[fi], 2.0 * x + effects[fi], x));
        }
        panel(&rows)
    }

    #[test]
    fn recovers_slope_under_firm_effects() {
        let spec = RegressionSpec { cluster: Cluster::Industry, ..RegressionSpec::new("y", &["x"], &[FixedEffect::Firm]) };
        let r = ols_fe(&noiseless(), &spec).unwrap();
        assert!((r.coefficients[0] - 2.0).abs() < 1e-12);
        assert_eq!((r.n, r.absorbed_dof, r.k, r.clusters), (12, 4, 5, Some(2)));
        assert!((r.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_cluster_is_rejected() {
        let spec = RegressionSpec::new("y", &["x"], &[FixedEffect::Firm]);
        assert_eq!(ols_fe(&noiseless_in(["m"; 4]), &spec), Err(Error::TooFewClusters(1)));
    }

    #[test]
    fn collinear_regressor_is_named() {
        let mut p = noiseless();
        let x2: Vec<Option<f64>> = p.field("x").unwrap().iter().map(|v| v.map(|x| 3.0 * x)).collect();
        p.add_field("x2", x2).unwrap();
        let firm_const: Vec<Option<f64>> = p.firm_ids().iter().map(|f| Some(if f == "a" { 1.0 } else { 0.0 })).collect();
        p.add_field("firm_a", firm_const).unwrap();
        let spec = RegressionSpec::new("y", &["x", "x2"], &[FixedEffect::Time]);
        assert_eq!(ols_fe(&p, &spec), Err(Error::RankDeficient(String::from("x2"))));
        let spec = RegressionSpec::new("y", &["x", "firm_a"], &[FixedEffect::Firm]);
        assert_eq!(ols_fe(&p, &spec), Err(Error::RankDeficient(String::from("firm_a"))));
    }

    #[test]
    fn nested_dimensions_absorb_once() {
        let labels = ["time", "time_industry"];
        let time = vec!["1", "1", "2", "2"].into_iter().map(String::from).collect();
        let ti = vec!["1m", "1n", "2m", "2n"].into_iter().map(String::from).collect();
        let a = Absorber::new(&labels, &[time, ti]);
        assert_eq!(a.dof, 4);
        let t: Vec<String> = ["1", "1", "2", "2", "3"].into_iter().map(String::from).collect();
        let f: Vec<String> = ["a", "b", "a", "b", "a"].into_iter().map(String::from).collect();
        let two = Absorber::new(&["time", "firm"], &[t, f]);
        assert_eq!(two.dof, 3 + 2 - 1);
    }

    #[test]
    fn two_way_demeaning_converges() {
        let t: Vec<String> = ["1", "1", "2", "2", "3", "3", "3"].into_iter().map(String::from).collect();
        let f: Vec<String> = ["a", "b", "a", "c", "b", "c", "a"].into_iter().map(String::from).collect();
        let a = Absorber::new(&["time", "firm"], &[t.clone(), f.clone()]);
        let mut v = vec![1.0, 4.0, -2.0, 0.5, 3.0, 9.0, -1.0];
        a.demean(&mut v).unwrap();
        for keys in [&t, &f] {
            let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
            for (k, x) in keys.iter().zip(&v) {
                *sums.entry(k).or_default() += x;
            }
            assert!(sums.values().all(|s| s.abs() < 1e-9));
        }
    }

    #[test]
    fn singletons_are_dropped_and_counted() {
        let mut rows = Vec::new();
        for (f, t, y, x) in [("a", "1", 1.0, 0.1), ("a", "2", 2.0, 0.5), ("b", "1", 0.0, 0.2), ("b", "2", 3.0, 0.9), ("c", "1", 5.0, 0.3)] {
            rows.push((f, t, "m", y, x));
        }
        let p = panel(&rows);
        let spec = RegressionSpec { cluster: Cluster::Observation, ..RegressionSpec::new("y", &["x"], &[FixedEffect::Firm]) };
        let r = ols_fe(&p, &spec).unwrap();
        assert_eq!((r.dropped_singletons, r.n), (1, 4));
        let keep = RegressionSpec { drop_singletons: false, ..spec };
        assert_eq!(ols_fe(&p, &keep).unwrap().n, 5);
    }

    #[test]
    fn unknown_field() {
        let spec = RegressionSpec::new("y", &["zz"], &[]);
        assert_eq!(ols_fe(&noiseless(), &spec), Err(Error::UnknownField(String::from("zz"))));
    }
}
