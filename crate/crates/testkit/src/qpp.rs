//! Straight-line QPP recomputations. Deliberately no shared helpers.

pub fn wig(scores: &[f64], corpus_score: f64, query_len: usize) -> f64 {
    let mut gain = 0.0;
    for s in scores {
        gain += s - corpus_score;
    }
    gain / scores.len() as f64 / (query_len as f64).sqrt()
}

pub fn nqc(scores: &[f64], corpus_score: f64) -> f64 {
    let k = scores.len() as f64;
    let mut sum = 0.0;
    for s in scores {
        sum += s;
    }
    let mean = sum / k;
    let mut sq = 0.0;
    for s in scores {
        sq += (s - mean) * (s - mean);
    }
    (sq / k).sqrt() / corpus_score
}

pub fn smv(scores: &[f64], corpus_score: f64) -> f64 {
    let k = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / k;
    let mut acc = 0.0;
    for s in scores {
        acc += s * (s / mean).ln().abs();
    }
    acc / k / corpus_score
}

pub fn n_sigma(scores: &[f64], corpus_score: f64, percent: f64) -> f64 {
    let top = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cut = percent / 100.0 * top;
    let kept: Vec<f64> = scores.iter().cloned().filter(|&s| s >= cut).collect();
    let m = kept.iter().sum::<f64>() / kept.len() as f64;
    let var = kept.iter().map(|s| (s - m).powi(2)).sum::<f64>() / kept.len() as f64;
    var.sqrt() / corpus_score
}
