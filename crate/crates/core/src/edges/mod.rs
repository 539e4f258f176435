//! Successor predicate over retrieved passages.
//!
//! A [`SuccessorScorer`] estimates, for an ordered pair `(a, b)`, the
//! probability that `b` continues `a`. [`score_pairs`] runs it over every
//! ordered pair of a retrieval result (through an optional [`PairCache`])
//! and [`binarize_edges`] turns the probabilities into a directed adjacency.

mod cache;
mod external;
mod heuristic;
mod pair_file;

use crate::checksum::sha256_hex;
use crate::corpus::Passage;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub use cache::PairCache;
pub use external::{ExternalOptions, ExternalScorer};
pub use heuristic::{heuristic_successor_score, HeuristicScorer};
pub use pair_file::{write_pair_requests, PairFileScorer};

/// One line of the pair-scoring wire protocol sent to a scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRequest {
    pub pair_id: String,
    pub text_a: String,
    pub text_b: String,
}

impl PairRequest {
    pub fn new(text_a: &str, text_b: &str) -> Self {
        PairRequest {
            pair_id: pair_key(text_a, text_b),
            text_a: text_a.to_string(),
            text_b: text_b.to_string(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScorerError {
    #[error("failed to launch scorer `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scorer I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("scorer exited before answering {missing} request(s)")]
    Exited { missing: usize },
    #[error("malformed scorer response on line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("scorer reported an error: {0}")]
    Remote(String),
    #[error("scorer did not answer within {0:?}")]
    Timeout(std::time::Duration),
    #[error("scorer session is no longer usable after an earlier failure")]
    Poisoned,
    #[error("no score available for {} pair(s), first: {}", .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    MissingPairs(Vec<String>),
    #[error("scorer returned {value} for pair {pair_id}, expected a probability")]
    OutOfRange { pair_id: String, value: f64 },
    #[error("scorer returned {got} scores for {expected} requests")]
    CountMismatch { expected: usize, got: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum EdgeError {
    #[error("need at least 2 passages to score pairs, got {0}")]
    TooFewPassages(usize),
    #[error("scoring {} pair(s) failed (first: {:?}): {source}", .pairs.len(), .pairs.first())]
    Scorer {
        /// `(passage a, passage b)` ids of every pair in the failed call.
        pairs: Vec<(String, String)>,
        #[source]
        source: ScorerError,
    },
    #[error("threshold {0} is not in [0, 1]")]
    InvalidThreshold(f64),
    #[error("pair cache: {0}")]
    Cache(#[from] std::io::Error),
}

/// Estimates the probability that `text_b` directly follows `text_a`.
pub trait SuccessorScorer: Send + Sync {
    /// Stable name used to key cached scores.
    fn scorer_id(&self) -> &str;

    /// Scores every request, returning probabilities in request order.
    fn score_batch(&self, requests: &[PairRequest]) -> Result<Vec<f64>, ScorerError>;
}

/// Content key of an ordered text pair.
pub fn pair_key(text_a: &str, text_b: &str) -> String {
    let mut buf = Vec::with_capacity(text_a.len() + text_b.len() + 16);
    buf.extend_from_slice(&(text_a.len() as u64).to_le_bytes());
    buf.extend_from_slice(text_a.as_bytes());
    buf.extend_from_slice(&(text_b.len() as u64).to_le_bytes());
    buf.extend_from_slice(text_b.as_bytes());
    sha256_hex(&buf)
}

/// Successor probabilities for every ordered pair of `passages`.
/// `probs[i][j]` is the probability that passage `j` follows passage `i`;
/// the diagonal is NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScoreSet {
    pub query_id: String,
    pub passages: Vec<String>,
    pub probs: Vec<Vec<f64>>,
    pub scorer_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMatrix {
    pub passages: Vec<String>,
    pub adj: Vec<Vec<bool>>,
}

impl EdgeMatrix {
    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().flatten().filter(|&&e| e).count()
    }
}

/// All ordered pair requests for `passages`, deduplicated by content key.
pub fn pair_requests(passages: &[Passage]) -> Vec<PairRequest> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, a) in passages.iter().enumerate() {
        for (j, b) in passages.iter().enumerate() {
            if i == j {
                continue;
            }
            let req = PairRequest::new(&a.text, &b.text);
            if seen.insert(req.pair_id.clone()) {
                out.push(req);
            }
        }
    }
    out
}

fn check_probability(pair_id: &str, p: f64) -> Result<f64, ScorerError> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(ScorerError::OutOfRange {
            pair_id: pair_id.to_string(),
            value: p,
        })
    }
}

/// Scores all `n * (n - 1)` ordered pairs. Cached pairs are not sent to
/// the scorer; the rest go out in a single call. Either every pair is
/// scored or an error naming the attempted pairs is returned.
pub fn score_pairs(
    query_id: &str,
    passages: &[Passage],
    scorer: &dyn SuccessorScorer,
    cache: Option<&PairCache>,
) -> Result<PairScoreSet, EdgeError> {
    let n = passages.len();
    if n < 2 {
        return Err(EdgeError::TooFewPassages(n));
    }
    let scorer_id = scorer.scorer_id();
    let mut known: HashMap<String, f64> = HashMap::new();
    let mut pending = Vec::new();
    let mut pending_ids = Vec::new();
    let mut queued = std::collections::HashSet::new();
    for (i, a) in passages.iter().enumerate() {
        for (j, b) in passages.iter().enumerate() {
            if i == j {
                continue;
            }
            let key = pair_key(&a.text, &b.text);
            if known.contains_key(&key) || queued.contains(&key) {
                continue;
            }
            match cache.and_then(|c| c.get(scorer_id, &key).transpose()).transpose()? {
                Some(p) => {
                    known.insert(key, p);
                }
                None => {
                    queued.insert(key.clone());
                    pending.push(PairRequest {
                        pair_id: key,
                        text_a: a.text.clone(),
                        text_b: b.text.clone(),
                    });
                    pending_ids.push((a.id.clone(), b.id.clone()));
                }
            }
        }
    }

    if !pending.is_empty() {
        let fail = |source| EdgeError::Scorer {
            pairs: pending_ids.clone(),
            source,
        };
        let probs = scorer.score_batch(&pending).map_err(fail)?;
        if probs.len() != pending.len() {
            return Err(fail(ScorerError::CountMismatch {
                expected: pending.len(),
                got: probs.len(),
            }));
        }
        let mut fresh = Vec::with_capacity(pending.len());
        for (req, p) in pending.iter().zip(probs) {
            let p = check_probability(&req.pair_id, p).map_err(fail)?;
            fresh.push((req.pair_id.clone(), p));
        }
        if let Some(cache) = cache {
            cache.insert_many(scorer_id, &fresh)?;
        }
        known.extend(fresh);
    }

    let probs = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        f64::NAN
                    } else {
                        known[&pair_key(&passages[i].text, &passages[j].text)]
                    }
                })
                .collect()
        })
        .collect();
    Ok(PairScoreSet {
        query_id: query_id.to_string(),
        passages: passages.iter().map(|p| p.id.clone()).collect(),
        probs,
        scorer_id: scorer_id.to_string(),
    })
}

/// Edge `i -> j` iff `probs[i][j] > threshold` (strictly).
pub fn binarize_edges(scores: &PairScoreSet, threshold: f64) -> Result<EdgeMatrix, EdgeError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(EdgeError::InvalidThreshold(threshold));
    }
    let adj = scores
        .probs
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, &p)| i != j && p > threshold).collect())
        .collect();
    Ok(EdgeMatrix {
        passages: scores.passages.clone(),
        adj,
    })
}

pub const DEFAULT_EDGE_THRESHOLD: f64 = 0.5;
