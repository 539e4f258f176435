//! Post-retrieval query performance predictors.
//!
//! All four work on the descending top-k retrieval scores, normalised by a
//! collection score `s_c`. Variances are population (1/k) variances.

use crate::corpus::{tokenize, Index, Query, RankedList};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum QppError {
    #[error("ranked list is empty")]
    EmptyRanking,
    #[error("corpus score must be positive, got {0}")]
    NonPositiveCorpusScore(f64),
    #[error("query has no terms")]
    EmptyQuery,
    #[error("score {0} is not positive")]
    NonPositiveScore(f64),
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),
    #[error("percentage {0} is outside (0, 100]")]
    BadPercentage(f64),
}

/// Validated predictor input.
#[derive(Debug, Clone, PartialEq)]
pub struct QppInput {
    scores: Vec<f64>,
    corpus_score: f64,
    query_len: usize,
}

impl QppInput {
    pub fn new(scores: Vec<f64>, corpus_score: f64, query_len: usize) -> Result<Self, QppError> {
        if scores.is_empty() {
            return Err(QppError::EmptyRanking);
        }
        if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(QppError::NonFiniteScore(bad));
        }
        if !(corpus_score > 0.0 && corpus_score.is_finite()) {
            return Err(QppError::NonPositiveCorpusScore(corpus_score));
        }
        if query_len == 0 {
            return Err(QppError::EmptyQuery);
        }
        Ok(QppInput {
            scores,
            corpus_score,
            query_len,
        })
    }

    /// Input for `query` from its retrieval result and the index's
    /// collection score.
    pub fn from_retrieval(index: &Index, query: &Query, ranked: &RankedList) -> Result<Self, QppError> {
        QppInput::new(ranked.scores(), index.corpus_score(query), tokenize(&query.text).len())
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn corpus_score(&self) -> f64 {
        self.corpus_score
    }

    pub fn query_len(&self) -> usize {
        self.query_len
    }

    fn mean(values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }

    fn std_dev(values: &[f64]) -> f64 {
        let mean = Self::mean(values);
        (values.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
    }
}

/// Weighted information gain: mean gain of the top-k scores over the
/// collection score, divided by √|q|.
pub fn wig(input: &QppInput) -> f64 {
    let k = input.scores.len() as f64;
    let gain: f64 = input.scores.iter().map(|s| s - input.corpus_score).sum();
    gain / k / (input.query_len as f64).sqrt()
}

/// Normalized query commitment: standard deviation of the top-k scores over
/// the collection score.
pub fn nqc(input: &QppInput) -> f64 {
    QppInput::std_dev(&input.scores) / input.corpus_score
}

/// Score magnitude and variance: mean of `s · |ln(s / μ)|` over the
/// collection score. Requires positive scores.
pub fn smv(input: &QppInput) -> Result<f64, QppError> {
    if let Some(&bad) = input.scores.iter().find(|&&s| s <= 0.0) {
        return Err(QppError::NonPositiveScore(bad));
    }
    let mu = QppInput::mean(&input.scores);
    let total: f64 = input.scores.iter().map(|&s| s * (s / mu).ln().abs()).sum();
    Ok(total / input.scores.len() as f64 / input.corpus_score)
}

/// Standard deviation of the scores within `percent`% of the top score,
/// over the collection score.
pub fn n_sigma_percent(input: &QppInput, percent: f64) -> Result<f64, QppError> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(QppError::BadPercentage(percent));
    }
    let top = input.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = percent / 100.0 * top;
    let kept: Vec<f64> = input.scores.iter().copied().filter(|&s| s >= cutoff).collect();
    Ok(QppInput::std_dev(&kept) / input.corpus_score)
}

pub const DEFAULT_N_SIGMA_PERCENT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predictor {
    Wig,
    Nqc,
    Smv,
    NSigma,
}

impl Predictor {
    pub fn evaluate(self, input: &QppInput, n_sigma_percent_value: f64) -> Result<f64, QppError> {
        match self {
            Predictor::Wig => Ok(wig(input)),
            Predictor::Nqc => Ok(nqc(input)),
            Predictor::Smv => smv(input),
            Predictor::NSigma => n_sigma_percent(input, n_sigma_percent_value),
        }
    }
}
