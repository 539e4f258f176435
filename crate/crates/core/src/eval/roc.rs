use super::EvalError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// ROC curve from sweeping every distinct score as a threshold, highest
/// first. Points run from (0, 0) to (1, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` pairs.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

fn class_counts(labels: &[bool]) -> Result<(usize, usize), EvalError> {
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass { positives, negatives });
    }
    Ok((positives, negatives))
}

/// `(true positives, false positives)` after each group of tied scores,
/// descending.
fn cumulative_counts(scores: &[f64], labels: &[bool]) -> Vec<(u64, u64, f64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut steps = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        steps.push((tp, fp, s));
    }
    steps
}

fn check_inputs(scores: &[f64], labels: &[bool]) -> Result<(usize, usize), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch(scores.len(), labels.len()));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(EvalError::NanScore(format!("#{i}")));
    }
    class_counts(labels)
}

/// ROC points and trapezoidal AUC. The area is accumulated in integer
/// counts and divided once, so it equals the tie-aware pair-counting AUC.
pub fn roc_and_auc(scores: &[f64], labels: &[bool]) -> Result<RocCurve, EvalError> {
    let (n_pos, n_neg) = check_inputs(scores, labels)?;
    let mut points = vec![(0.0, 0.0)];
    let mut twice_area: u128 = 0;
    let (mut prev_tp, mut prev_fp) = (0u64, 0u64);
    for (tp, fp, _) in cumulative_counts(scores, labels) {
        twice_area += (fp - prev_fp) as u128 * (tp + prev_tp) as u128;
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        (prev_tp, prev_fp) = (tp, fp);
    }
    let auc = twice_area as f64 / (2.0 * n_pos as f64 * n_neg as f64);
    Ok(RocCurve {
        points,
        auc,
        n_pos,
        n_neg,
    })
}

pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    roc_and_auc(scores, labels).map(|r| r.auc)
}

/// Query ids, scores and labels in matching order.
pub type Aligned = (Vec<String>, Vec<f64>, Vec<bool>);

/// Lines up a score map with a label map. Every labelled query must be
/// scored and every scored query labelled. Output follows label key order.
pub fn align(scores: &HashMap<String, f64>, labels: &BTreeMap<String, bool>) -> Result<Aligned, EvalError> {
    let missing: Vec<String> = labels.keys().filter(|id| !scores.contains_key(*id)).cloned().collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingScores(missing));
    }
    let mut unknown: Vec<String> = scores.keys().filter(|id| !labels.contains_key(*id)).cloned().collect();
    if !unknown.is_empty() {
        unknown.sort();
        return Err(EvalError::UnknownQueries(unknown));
    }
    let ids: Vec<String> = labels.keys().cloned().collect();
    let values = ids.iter().map(|id| scores[id]).collect();
    Ok((ids, values, labels.values().copied().collect()))
}

/// Threshold maximising Youden's J = TPR − FPR for the rule
/// `score > threshold`, scanning the distinct scores; ties go to the
/// higher threshold.
pub fn select_threshold(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    let (n_pos, n_neg) = check_inputs(scores, labels)?;
    let mut best: Option<(f64, f64)> = None;
    let (mut above_tp, mut above_fp) = (0u64, 0u64);
    for (tp, fp, s) in cumulative_counts(scores, labels) {
        // Only strictly higher scores are predicted positive at threshold s.
        let j = above_tp as f64 / n_pos as f64 - above_fp as f64 / n_neg as f64;
        if best.is_none_or(|(bj, _)| j > bj) {
            best = Some((j, s));
        }
        (above_tp, above_fp) = (tp, fp);
    }
    Ok(best.expect("at least two scores").1)
}
