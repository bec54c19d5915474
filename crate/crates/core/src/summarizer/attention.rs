use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, Matrix};
use crate::{Error, Result};

/// Token embeddings and the query/key/value projections of one attention
/// head. Vocabulary lookups are case-insensitive (entries are lower-cased).
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionModel {
    vocab: BTreeMap<String, usize>,
    embeddings: Matrix,
    w_q: Matrix,
    w_k: Matrix,
    w_v: Matrix,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
    Matrix::from_row_major(rows, cols, data)
}

impl AttentionModel {
    /// `embeddings` is `|vocab| × m`; `w_q`, `w_k` are `m × d_k` and `w_v` is
    /// `m × d_v`.
    pub fn new(vocab: Vec<String>, embeddings: Matrix, w_q: Matrix, w_k: Matrix, w_v: Matrix) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(String::from(msg)));
        if embeddings.rows() != vocab.len() {
            return bad("embedding rows must match the vocabulary size");
        }
        let m = embeddings.cols();
        if w_q.rows() != m || w_k.rows() != m || w_v.rows() != m {
            return bad("projection rows must match the embedding dimension");
        }
        if w_q.cols() != w_k.cols() || w_q.cols() == 0 {
            return bad("query and key dimensions must be equal and positive");
        }
        if !(embeddings.is_finite() && w_q.is_finite() && w_k.is_finite() && w_v.is_finite()) {
            return bad("model weights must be finite");
        }
        let mut map = BTreeMap::new();
        for (i, w) in vocab.into_iter().enumerate() {
            if map.insert(w.to_lowercase(), i).is_some() {
                return bad("duplicate vocabulary entry");
            }
        }
        Ok(AttentionModel { vocab: map, embeddings, w_q, w_k, w_v })
    }

    /// A model with pseudo-random weights. Each token's embedding depends
    /// only on `seed` and the token itself, so growing the vocabulary never
    /// changes existing rows.
    pub fn seeded<I, S>(vocab: I, embedding_dim: usize, key_dim: usize, value_dim: usize, seed: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::seeded_with_scale(vocab, embedding_dim, key_dim, value_dim, seed, 1.0)
    }

    /// [`AttentionModel::seeded`] with projection weights multiplied by
    /// `scale`; larger values concentrate attention on fewer tokens.
    pub fn seeded_with_scale<I, S>(
        vocab: I,
        embedding_dim: usize,
        key_dim: usize,
        value_dim: usize,
        seed: u64,
        scale: f64,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(String::from("weight scale must be positive and finite")));
        }
        let mut words: Vec<String> = vocab.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        words.sort();
        words.dedup();
        let mut data = Vec::with_capacity(words.len() * embedding_dim);
        for w in &words {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(w.as_bytes()));
            data.extend((0..embedding_dim).map(|_| rng.random_range(-1.0..1.0)));
        }
        let embeddings = Matrix::from_row_major(words.len(), embedding_dim, data);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = scale / libm::sqrt(embedding_dim.max(1) as f64);
        let w_q = random_matrix(&mut rng, embedding_dim, key_dim, scale);
        let w_k = random_matrix(&mut rng, embedding_dim, key_dim, scale);
        let w_v = random_matrix(&mut rng, embedding_dim, value_dim, scale);
        Self::new(words, embeddings, w_q, w_k, w_v)
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = (&str, usize)> {
        self.vocab.iter().map(|(w, &i)| (w.as_str(), i))
    }

    pub fn embedding_dim(&self) -> usize {
        self.embeddings.cols()
    }

    pub fn key_dim(&self) -> usize {
        self.w_k.cols()
    }

    pub fn embeddings(&self) -> &Matrix {
        &self.embeddings
    }

    pub fn w_q(&self) -> &Matrix {
        &self.w_q
    }

    pub fn w_k(&self) -> &Matrix {
        &self.w_k
    }

    pub fn w_v(&self) -> &Matrix {
        &self.w_v
    }

    pub fn token_id(&self, token: &str) -> Result<usize> {
        self.vocab
            .get(&token.to_lowercase())
            .copied()
            .ok_or_else(|| Error::UnknownToken(String::from(token)))
    }

    /// Rows of `X·W` for the given tokens.
    fn project(&self, ids: &[usize], w: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(ids.len(), w.cols());
        for (r, &id) in ids.iter().enumerate() {
            let x = self.embeddings.row(id);
            let row = out.row_mut(r);
            for (k, &xk) in x.iter().enumerate() {
                for (o, &wkj) in row.iter_mut().zip(w.row(k)) {
                    *o += xk * wkj;
                }
            }
        }
        out
    }

    fn queries_and_keys(&self, tokens: &[&str]) -> Result<(Matrix, Matrix)> {
        let ids = tokens.iter().map(|t| self.token_id(t)).collect::<Result<Vec<_>>>()?;
        Ok((self.project(&ids, &self.w_q), self.project(&ids, &self.w_k)))
    }
}

/// Softmax of `q·Kᵀ/√d_k` for one query row, written into `out`.
fn attention_row(q: &[f64], keys: &Matrix, scale: f64, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        *o = dot(q, keys.row(j)) * scale;
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = libm::exp(*o - max);
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// The `n × n` attention matrix `softmax(Q·Kᵀ/√d_k)` with `Q = X·W_Q`,
/// `K = X·W_K`; every row sums to one.
pub fn attention_scores(tokens: &[&str], model: &AttentionModel) -> Result<Matrix> {
    if tokens.is_empty() {
        return Err(Error::InvalidParameter(String::from("attention needs at least one token")));
    }
    let (q, k) = model.queries_and_keys(tokens)?;
    let n = tokens.len();
    let scale = 1.0 / libm::sqrt(model.key_dim() as f64);
    let mut scores = Matrix::zeros(n, n);
    for i in 0..n {
        attention_row(q.row(i), &k, scale, scores.row_mut(i));
    }
    Ok(scores)
}

/// Token relevance (mean attention received) computed row by row, without
/// materializing the full attention matrix.
pub fn token_relevance(tokens: &[&str], model: &AttentionModel) -> Result<RelevanceProfile> {
    if tokens.is_empty() {
        return RelevanceProfile::from_scores(Vec::new());
    }
    let (q, k) = model.queries_and_keys(tokens)?;
    let n = tokens.len();
    let scale = 1.0 / libm::sqrt(model.key_dim() as f64);
    let mut row = alloc::vec![0.0; n];
    let mut col_sums = alloc::vec![0.0; n];
    for i in 0..n {
        attention_row(q.row(i), &k, scale, &mut row);
        for (c, r) in col_sums.iter_mut().zip(&row) {
            *c += r;
        }
    }
    RelevanceProfile::from_scores(col_sums.into_iter().map(|c| c / n as f64).collect())
}

/// Relevance scores in [0,1] with their descending rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceProfile {
    pub scores: Vec<f64>,
    /// Indices sorted by descending score; ties keep original position.
    pub order: Vec<usize>,
}

impl RelevanceProfile {
    pub fn from_scores(scores: Vec<f64>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidParameter(alloc::format!("relevance score {bad} outside [0,1]")));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        // Stable sort keeps earlier positions first among equal scores.
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        Ok(RelevanceProfile { scores, order })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// s̄(1) ≥ s̄(2) ≥ … ≥ s̄(n).
    pub fn sorted(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.scores[i]).collect()
    }

    /// Scores divided by the largest, so the most relevant token scores 1.
    pub fn normalized_by_max(&self) -> RelevanceProfile {
        let max = self.scores.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return self.clone();
        }
        let scores = self.scores.iter().map(|s| (s / max).min(1.0)).collect();
        RelevanceProfile { scores, order: self.order.clone() }
    }
}

fn check_stochastic(matrix: &Matrix) -> Result<()> {
    if matrix.rows() != matrix.cols() || matrix.rows() == 0 {
        return Err(Error::MalformedMatrix(String::from("attention matrix must be square and non-empty")));
    }
    for i in 0..matrix.rows() {
        let row = matrix.row(i);
        if row.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::MalformedMatrix(alloc::format!("row {i} has a negative or non-finite entry")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::MalformedMatrix(alloc::format!("row {i} sums to {sum}")));
        }
    }
    Ok(())
}

/// Relevance of each token as the mean of its attention column, i.e. the
/// average attention it receives from every token.
pub fn relevance(matrix: &Matrix) -> Result<RelevanceProfile> {
    check_stochastic(matrix)?;
    let n = matrix.rows();
    let mut col = alloc::vec![0.0; n];
    for i in 0..n {
        for (c, x) in col.iter_mut().zip(matrix.row(i)) {
            *c += x;
        }
    }
    RelevanceProfile::from_scores(col.into_iter().map(|c| (c / n as f64).min(1.0)).collect())
}

/// Row means of a row-stochastic matrix. Every entry equals `1/n`, so this
/// cannot rank tokens; kept to document why [`relevance`] uses columns.
pub fn row_mean_relevance(matrix: &Matrix) -> Result<Vec<f64>> {
    check_stochastic(matrix)?;
    let n = matrix.cols() as f64;
    Ok((0..matrix.rows()).map(|i| matrix.row(i).iter().sum::<f64>() / n).collect())
}
