#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn ok(&self) -> &Self {
        assert_eq!(self.code, 0, "stdout:\n{}\nstderr:\n{}", self.stdout, self.stderr);
        self
    }
}

pub fn clarity<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out: Output = Command::new(env!("CARGO_BIN_EXE_clarity"))
        .args(args)
        .env_remove("CLARITY_CACHE_DIR")
        .output()
        .expect("binary runs");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

pub fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

pub fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Parses a run file into `(query id, score)` pairs.
pub fn run_scores(p: &Path) -> Vec<(String, f64)> {
    read(p)
        .lines()
        .map(|l| {
            let (id, v) = l.split_once('\t').unwrap();
            (id.to_string(), v.parse().unwrap())
        })
        .collect()
}

/// Writes the synthetic corpus and its ClariQ-format query file.
pub fn synthetic_inputs(dir: &Path, f: &clarity_testkit::synthetic::SyntheticFixture) -> (PathBuf, PathBuf) {
    (
        write(dir, "corpus.tsv", &f.corpus_tsv()),
        write(dir, "queries.tsv", &f.clariq_tsv()),
    )
}

pub const AMBIGNQ_FIXTURE: &str = r#"[
  {"id": "n1", "question": "alpha one", "annotations": [{"type": "singleAnswer", "answer": ["a"]}]},
  {"id": "n2", "question": "alpha two", "annotations": [{"type": "multipleQAs", "qaPairs": [{"question": "x", "answer": ["a"]}, {"question": "y", "answer": ["b"]}]}]},
  {"id": "n3", "question": "beta three", "annotations": [{"type": "singleAnswer", "answer": ["a"]}, {"type": "multipleQAs", "qaPairs": [{}, {}, {}]}]},
  {"id": "n4", "question": "beta four", "annotations": [{"type": "multipleQAs", "qaPairs": [{}, {}, {}, {}]}]},
  {"id": "n5", "question": "gamma five", "annotations": [{"type": "multipleQAs", "qaPairs": [{}, {}, {}, {}, {}, {}]}]},
  {"id": "n6", "question": "gamma six", "annotations": [{"type": "singleAnswer", "answer": ["z"]}]}
]"#;

/// `(id, bucket)` for [`AMBIGNQ_FIXTURE`], counted by hand.
pub const AMBIGNQ_BUCKETS: [(&str, u32); 6] = [("n1", 1), ("n2", 2), ("n3", 3), ("n4", 4), ("n5", 6), ("n6", 1)];

pub const CLARIQ_FIXTURE: &str = "topic_id\tinitial_request\ttopic_desc\tclarification_need\n\
201\tTell me about Obama family tree.\tfamily\t2\n\
202\tFind me information about the sun\tstar\t3\n\
203\tI'm looking for cheap internet service providers\tisp\t1\n\
204\tWhat is the 'rat pack'?\tpack\t4\n\
205\tTell me more about \"uss yorktown\"\tship\t3\n\
206\tHow to find a mortgage calculator\tcalc\t1\n";

/// `(id, level)` for [`CLARIQ_FIXTURE`].
pub const CLARIQ_LEVELS: [(&str, u8); 6] = [("201", 2), ("202", 3), ("203", 1), ("204", 4), ("205", 3), ("206", 1)];
