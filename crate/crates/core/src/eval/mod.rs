//! Dataset loaders and evaluation: ROC/AUC, paired bootstrap significance,
//! threshold selection, AmbigNQ bucket reports and run files.

mod buckets;
mod datasets;
mod report;
mod roc;
mod run;
mod significance;

use std::path::PathBuf;

pub use buckets::{bucket_group, bucket_report, BucketStat};
pub use datasets::{
    binarize_clariq, load_ambignq, load_clariq, load_clariq_requests, AmbigNqLoad, LabeledQuery, Split,
};
pub use report::{Comparison, EvalReport};
pub use roc::{align, auc, roc_and_auc, select_threshold, Aligned, RocCurve};
pub use run::{PredictionRun, MAX_AMBIGUITY};
pub use significance::{paired_significance, BootstrapOptions, Significance};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: &'static str },
    #[error("{path}, row {row}: {message}")]
    BadRow { path: PathBuf, row: usize, message: String },
    #[error("{path}: {message}")]
    BadFile { path: PathBuf, message: String },
    #[error("clarity level {0} is outside 1..=4")]
    LevelOutOfRange(i64),
    #[error("need at least one positive and one negative label ({positives} positive, {negatives} negative)")]
    SingleClass { positives: usize, negatives: usize },
    #[error("{} labelled queries have no score: {}", .0.len(), preview(.0))]
    MissingScores(Vec<String>),
    #[error("{} scored queries are not in the dataset: {}", .0.len(), preview(.0))]
    UnknownQueries(Vec<String>),
    #[error("score for `{0}` is NaN")]
    NanScore(String),
    #[error("score lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("bucket {0} is not a valid question-answer pair count")]
    BadBucket(u32),
    #[error("gave up after {0} single-class bootstrap resamples in a row")]
    DegenerateResamples(usize),
}

fn preview(ids: &[String]) -> String {
    let shown: Vec<&str> = ids.iter().take(5).map(String::as_str).collect();
    if ids.len() > 5 {
        format!("{}, ...", shown.join(", "))
    } else {
        shown.join(", ")
    }
}

impl EvalError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
