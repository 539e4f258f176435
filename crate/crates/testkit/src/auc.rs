//! Pair-counting AUC and an exhaustive Youden threshold scan.

pub fn pair_counting_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0usize;
    for (i, &si) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1;
            if si > sj {
                credit += 1.0;
            } else if si == sj {
                credit += 0.5;
            }
        }
    }
    credit / pairs as f64
}

/// Scans every distinct score as a `score > t` cut and keeps the best
/// TPR - FPR, preferring the higher threshold on ties.
pub fn exhaustive_youden(scores: &[f64], labels: &[bool]) -> f64 {
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = labels.len() as f64 - pos;
    let mut best: Option<(f64, f64)> = None;
    for &t in scores {
        let mut tp = 0.0;
        let mut fp = 0.0;
        for (s, &l) in scores.iter().zip(labels) {
            if *s > t {
                if l {
                    tp += 1.0;
                } else {
                    fp += 1.0;
                }
            }
        }
        let j = tp / pos - fp / neg;
        best = match best {
            None => Some((j, t)),
            Some((bj, bt)) if j > bj || (j == bj && t > bt) => Some((j, t)),
            keep => keep,
        };
    }
    best.expect("non-empty").1
}
