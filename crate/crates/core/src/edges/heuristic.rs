use super::{PairRequest, ScorerError, SuccessorScorer};
use crate::corpus::tokenize;
use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

const SLOPE: f64 = 8.0;
const MIDPOINT: f64 = 0.25;

/// Token-set Jaccard similarity squashed through `σ(8 · (J − 0.25))`.
/// Symmetric, so it cannot tell direction; it stands in for a real
/// next-sentence model in tests and desk-scale runs. Two texts without any
/// tokens have J = 0.
pub fn heuristic_successor_score(text_a: &str, text_b: &str) -> f64 {
    let a: HashSet<String> = tokenize(text_a).into_iter().collect();
    let b: HashSet<String> = tokenize(text_b).into_iter().collect();
    let union = a.union(&b).count();
    let jaccard = if union == 0 {
        0.0
    } else {
        a.intersection(&b).count() as f64 / union as f64
    };
    1.0 / (1.0 + (-SLOPE * (jaccard - MIDPOINT)).exp())
}

/// [`heuristic_successor_score`] as a [`SuccessorScorer`], counting how
/// many pairs it has been asked to score.
#[derive(Debug, Default)]
pub struct HeuristicScorer {
    scored: AtomicUsize,
}

impl HeuristicScorer {
    pub const ID: &'static str = "heuristic-jaccard-v1";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn pairs_scored(&self) -> usize {
        self.scored.load(Ordering::Relaxed)
    }
}

impl SuccessorScorer for HeuristicScorer {
    fn scorer_id(&self) -> &str {
        Self::ID
    }

    fn score_batch(&self, requests: &[PairRequest]) -> Result<Vec<f64>, ScorerError> {
        self.scored.fetch_add(requests.len(), Ordering::Relaxed);
        Ok(requests
            .iter()
            .map(|r| heuristic_successor_score(&r.text_a, &r.text_b))
            .collect())
    }
}
