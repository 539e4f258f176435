//! Passage corpus, inverted index and BM25 retrieval.

mod index;
mod store;
mod tokenizer;

use serde::{Deserialize, Serialize};
use std::io::BufRead;
use std::path::{Path, PathBuf};

pub use index::{build_index, Bm25Params, Index, Posting};
pub use store::{load_index, save_index, IndexMetadata, INDEX_FILE, METADATA_FILE};
pub use tokenizer::{tokenize, TOKENIZER_ID};

/// Score returned by [`Index::corpus_score`] when no query term occurs in
/// the collection.
pub const CORPUS_SCORE_FLOOR: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate passage id `{0}`")]
    DuplicateId(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("passage `{0}` has no text")]
    EmptyPassage(String),
    #[error("line {line}: expected `<pid>\\t<text>`")]
    MalformedLine { line: usize },
    #[error("unknown passage id `{0}`")]
    UnknownPassage(String),
    #[error("corrupt index: {0}")]
    Corrupt(String),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    pub id: String,
    pub text: String,
}

impl Passage {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Passage {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
}

impl Query {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Query {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub passage_id: String,
    pub score: f64,
}

/// Retrieval result for one query, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    /// The first `k` entries. Retrieval at depth `k` is always a prefix of
    /// retrieval at a larger depth, so this is how depth sweeps reuse one run.
    pub fn truncated(&self, k: usize) -> RankedList {
        RankedList {
            query_id: self.query_id.clone(),
            entries: self.entries.iter().take(k).cloned().collect(),
        }
    }
}

/// Reads an MS MARCO style `<pid>\t<text>` file. Blank lines are skipped.
pub fn read_corpus_tsv(path: &Path) -> Result<Vec<Passage>, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut passages = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line
            .split_once('\t')
            .ok_or(CorpusError::MalformedLine { line: i + 1 })?;
        if id.is_empty() {
            return Err(CorpusError::MalformedLine { line: i + 1 });
        }
        passages.push(Passage::new(id, text));
    }
    Ok(passages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn reads_tsv_and_reports_bad_lines() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "p1\thello world\n\np2\tsecond\tpassage").unwrap();
        let passages = read_corpus_tsv(f.path()).unwrap();
        assert_eq!(passages.len(), 2);
        assert_eq!(passages[1].text, "second\tpassage");

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "p1\tok\nno tab here").unwrap();
        assert!(matches!(
            read_corpus_tsv(bad.path()),
            Err(CorpusError::MalformedLine { line: 2 })
        ));
    }

    #[test]
    fn truncation_is_a_prefix() {
        let list = RankedList {
            query_id: "q".into(),
            entries: vec![
                RankedEntry {
                    passage_id: "a".into(),
                    score: 3.0,
                },
                RankedEntry {
                    passage_id: "b".into(),
                    score: 2.0,
                },
            ],
        };
        assert_eq!(list.truncated(1).entries, list.entries[..1]);
        assert_eq!(list.truncated(5), list);
    }
}
