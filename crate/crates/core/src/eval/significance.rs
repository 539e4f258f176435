use super::roc::auc;
use super::EvalError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub resamples: usize,
    pub seed: u64,
    /// Consecutive single-class redraws tolerated for one resample.
    pub max_redraws: usize,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            resamples: 10_000,
            seed: 0,
            max_redraws: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub auc_a: f64,
    pub auc_b: f64,
    pub observed_diff: f64,
    /// Resamples whose AUC difference was zero or of the opposite sign.
    pub sign_flips: usize,
    pub p_value: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Paired bootstrap over queries for the AUC difference between two
/// methods scored on the same queries.
///
/// Queries are resampled with replacement (single-class resamples are
/// redrawn) and the AUC difference recomputed. With `f` the number of
/// resamples whose difference is zero or opposite in sign to the observed
/// one, `p = min(1, 2 (f + 1) / (R + 1))`. A zero observed difference gives
/// `p = 1`.
pub fn paired_significance(
    scores_a: &[f64],
    scores_b: &[f64],
    labels: &[bool],
    options: BootstrapOptions,
) -> Result<Significance, EvalError> {
    if scores_a.len() != scores_b.len() {
        return Err(EvalError::LengthMismatch(scores_a.len(), scores_b.len()));
    }
    let auc_a = auc(scores_a, labels)?;
    let auc_b = auc(scores_b, labels)?;
    let observed = auc_a - auc_b;

    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut sa = vec![0.0; n];
    let mut sb = vec![0.0; n];
    let mut sl = vec![false; n];
    let mut flips = 0usize;
    for _ in 0..options.resamples {
        let mut redraws = 0;
        loop {
            for slot in 0..n {
                let i = rng.random_range(0..n);
                sa[slot] = scores_a[i];
                sb[slot] = scores_b[i];
                sl[slot] = labels[i];
            }
            if sl.iter().any(|&l| l) && sl.iter().any(|&l| !l) {
                break;
            }
            redraws += 1;
            if redraws > options.max_redraws {
                return Err(EvalError::DegenerateResamples(redraws));
            }
        }
        let diff = auc(&sa, &sl)? - auc(&sb, &sl)?;
        if diff * observed.signum() <= 0.0 {
            flips += 1;
        }
    }
    let p_value = if observed == 0.0 {
        1.0
    } else {
        (2.0 * (flips as f64 + 1.0) / (options.resamples as f64 + 1.0)).min(1.0)
    };
    Ok(Significance {
        auc_a,
        auc_b,
        observed_diff: observed,
        sign_flips: flips,
        p_value,
        resamples: options.resamples,
        seed: options.seed,
    })
}
