use super::EvalError;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "val" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledQuery {
    pub query_id: String,
    pub text: String,
    /// ClariQ clarification need, 1 (clear) to 4 (most ambiguous).
    pub clarity_level: Option<u8>,
    /// AmbigNQ question-answer pair count.
    pub bucket: Option<u32>,
    pub split: Split,
}

impl LabeledQuery {
    pub fn query(&self) -> crate::corpus::Query {
        crate::corpus::Query::new(self.query_id.clone(), self.text.clone())
    }

    /// ClariQ binary label; `None` for AmbigNQ queries.
    pub fn needs_clarification(&self) -> Option<bool> {
        self.clarity_level.map(|l| l >= 3)
    }
}

/// Levels 1 and 2 need no clarification, 3 and 4 do.
pub fn binarize_clariq(level: i64) -> Result<bool, EvalError> {
    match level {
        1 | 2 => Ok(false),
        3 | 4 => Ok(true),
        other => Err(EvalError::LevelOutOfRange(other)),
    }
}

/// Reads a ClariQ TSV (header with `topic_id`, `initial_request`,
/// `clarification_need`; other columns ignored). The released files repeat
/// each topic once per facet/question row; repeats collapse into a single
/// query and must agree on request text and level. Row numbers in errors
/// count the header as row 1.
pub fn load_clariq(path: &Path, split: Split) -> Result<Vec<LabeledQuery>, EvalError> {
    read_clariq(path, split, true)
}

/// Like [`load_clariq`], but a missing `clarification_need` column is
/// allowed, leaving every `clarity_level` empty. Suits unlabelled request
/// files that are only scored, never evaluated.
pub fn load_clariq_requests(path: &Path, split: Split) -> Result<Vec<LabeledQuery>, EvalError> {
    read_clariq(path, split, false)
}

fn read_clariq(path: &Path, split: Split, require_level: bool) -> Result<Vec<LabeledQuery>, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(EvalError::MissingColumn {
                path: path.to_path_buf(),
                column: name,
            })
    };
    let (id_col, text_col) = (column("topic_id")?, column("initial_request")?);
    let level_col = match column("clarification_need") {
        Ok(c) => Some(c),
        Err(e) if require_level => return Err(e),
        Err(_) => None,
    };

    let mut queries: Vec<LabeledQuery> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let bad = |message: String| EvalError::BadRow {
            path: path.to_path_buf(),
            row,
            message,
        };
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| {
            record
                .get(c)
                .map(str::trim)
                .ok_or_else(|| bad(format!("missing field {}", c + 1)))
        };
        let id = field(id_col)?.to_string();
        let text = field(text_col)?.to_string();
        let level = match level_col {
            Some(c) => {
                let raw = field(c)?;
                let level: i64 = raw
                    .parse()
                    .map_err(|_| bad(format!("clarification_need `{raw}` is not an integer")))?;
                binarize_clariq(level).map_err(|e| bad(e.to_string()))?;
                Some(level as u8)
            }
            None => None,
        };
        if id.is_empty() {
            return Err(bad("empty topic_id".into()));
        }
        if let Some(&at) = seen.get(&id) {
            let prev = &queries[at];
            if prev.text != text || prev.clarity_level != level {
                return Err(bad(format!("topic `{id}` repeats with a different request or level")));
            }
            continue;
        }
        seen.insert(id.clone(), queries.len());
        queries.push(LabeledQuery {
            query_id: id,
            text,
            clarity_level: level,
            bucket: None,
            split,
        });
    }
    Ok(queries)
}

fn csv_error(path: &Path, e: csv::Error) -> EvalError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => EvalError::io(path, io),
        other => EvalError::BadFile {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

#[derive(Debug, Clone)]
pub struct AmbigNqLoad {
    pub queries: Vec<LabeledQuery>,
    /// Records dropped because they carried no annotation.
    pub skipped: usize,
}

#[derive(Deserialize)]
struct AmbigRecord {
    id: serde_json::Value,
    question: String,
    #[serde(default)]
    annotations: Vec<Annotation>,
}

#[derive(Deserialize)]
struct Annotation {
    #[serde(rename = "type")]
    kind: String,
    #[serde(rename = "qaPairs", default)]
    qa_pairs: Vec<serde_json::Value>,
}

/// Reads an AmbigNQ JSON array. A `singleAnswer` annotation counts one
/// question-answer pair, a `multipleQAs` annotation counts its `qaPairs`;
/// a question's bucket is the largest count over its annotations.
pub fn load_ambignq(path: &Path, split: Split) -> Result<AmbigNqLoad, EvalError> {
    let raw = std::fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
    let records: Vec<AmbigRecord> = serde_json::from_str(&raw).map_err(|e| EvalError::BadFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut queries = Vec::with_capacity(records.len());
    let mut skipped = 0;
    for (i, rec) in records.into_iter().enumerate() {
        let bad = |message: String| EvalError::BadRow {
            path: path.to_path_buf(),
            row: i + 1,
            message,
        };
        if rec.annotations.is_empty() {
            skipped += 1;
            continue;
        }
        let mut bucket = 0u32;
        for ann in &rec.annotations {
            let count = match ann.kind.as_str() {
                "singleAnswer" => 1,
                "multipleQAs" => (ann.qa_pairs.len() as u32).max(1),
                other => return Err(bad(format!("unknown annotation type `{other}`"))),
            };
            bucket = bucket.max(count);
        }
        let id = match rec.id {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        };
        queries.push(LabeledQuery {
            query_id: id,
            text: rec.question,
            clarity_level: None,
            bucket: Some(bucket),
            split,
        });
    }
    if skipped > 0 {
        log::warn!("{}: skipped {skipped} record(s) without annotations", path.display());
    }
    Ok(AmbigNqLoad { queries, skipped })
}
