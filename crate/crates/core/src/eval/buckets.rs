use super::EvalError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketStat {
    pub queries: usize,
    pub predicted_ambiguous: usize,
    pub percent: f64,
}

/// Buckets 1, 2, 3 and 4+ (reported as 4).
pub fn bucket_group(qa_pairs: u32) -> Result<u32, EvalError> {
    match qa_pairs {
        0 => Err(EvalError::BadBucket(0)),
        n => Ok(n.min(4)),
    }
}

/// Percentage of each bucket's queries with `score > threshold`. Buckets
/// without queries are left out.
pub fn bucket_report(
    scores: &HashMap<String, f64>,
    buckets: &BTreeMap<String, u32>,
    threshold: f64,
) -> Result<BTreeMap<u32, BucketStat>, EvalError> {
    let missing: Vec<String> = buckets.keys().filter(|id| !scores.contains_key(*id)).cloned().collect();
    if !missing.is_empty() {
        return Err(EvalError::MissingScores(missing));
    }
    let mut counts: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for (id, &b) in buckets {
        let entry = counts.entry(bucket_group(b)?).or_default();
        entry.0 += 1;
        if scores[id] > threshold {
            entry.1 += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|(b, (total, hits))| {
            let stat = BucketStat {
                queries: total,
                predicted_ambiguous: hits,
                percent: 100.0 * hits as f64 / total as f64,
            };
            (b, stat)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (HashMap<String, f64>, BTreeMap<String, u32>) {
        // 12 queries: buckets 1,1,1,1 / 2,2,2 / 3,3 / 4,5,7
        let buckets = [1, 1, 1, 1, 2, 2, 2, 3, 3, 4, 5, 7];
        let scores = [0.1, 0.9, 0.2, 0.3, 0.8, 0.7, 0.1, 0.6, 0.4, 0.9, 0.95, 0.2];
        let ids: Vec<String> = (0..12).map(|i| format!("q{i:02}")).collect();
        (
            ids.iter().cloned().zip(scores).collect(),
            ids.into_iter().zip(buckets).collect(),
        )
    }

    #[test]
    fn hand_counted_percentages() {
        let (scores, buckets) = fixture();
        let report = bucket_report(&scores, &buckets, 0.5).unwrap();
        let pct: Vec<f64> = report.values().map(|s| s.percent).collect();
        // 1/4, 2/3, 1/2, 2/3 above 0.5
        assert_eq!(pct, vec![25.0, 200.0 / 3.0, 50.0, 200.0 / 3.0]);
        assert_eq!(report[&4].queries, 3);
    }

    #[test]
    fn all_or_nothing_thresholds() {
        let (scores, buckets) = fixture();
        assert!(bucket_report(&scores, &buckets, -1.0)
            .unwrap()
            .values()
            .all(|s| s.percent == 100.0));
        assert!(bucket_report(&scores, &buckets, 1.0)
            .unwrap()
            .values()
            .all(|s| s.percent == 0.0));
    }

    #[test]
    fn empty_buckets_are_absent() {
        let scores: HashMap<String, f64> = [("a".to_string(), 1.0)].into();
        let buckets: BTreeMap<String, u32> = [("a".to_string(), 2)].into();
        let report = bucket_report(&scores, &buckets, 0.0).unwrap();
        assert_eq!(report.keys().copied().collect::<Vec<_>>(), vec![2]);
        let zero: BTreeMap<String, u32> = [("a".to_string(), 0)].into();
        assert!(matches!(
            bucket_report(&scores, &zero, 0.0),
            Err(EvalError::BadBucket(0))
        ));
    }
}
