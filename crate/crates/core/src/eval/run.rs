//! Prediction run files: `query_id \t score` lines plus a JSON provenance
//! sidecar. Scores follow the "higher = more ambiguous" convention.

use super::EvalError;
use serde_json::Value;
use std::collections::{HashMap, HashSet};
use std::fmt::Write;
use std::path::{Path, PathBuf};

/// Score given to queries whose retrieval is too small to score.
pub const MAX_AMBIGUITY: f64 = f64::INFINITY;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRun {
    pub method_id: String,
    /// In output order.
    pub scores: Vec<(String, f64)>,
    pub k_used: Option<usize>,
    pub provenance: Value,
}

impl PredictionRun {
    pub fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("provenance.json")
    }

    pub fn score_map(&self) -> HashMap<String, f64> {
        self.scores.iter().cloned().collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, score) in &self.scores {
            writeln!(out, "{id}\t{score}").unwrap();
        }
        out
    }

    fn sidecar(&self) -> Value {
        serde_json::json!({
            "method_id": self.method_id,
            "k_used": self.k_used,
            "provenance": self.provenance,
        })
    }

    /// Writes the run file and its `.provenance.json` sidecar.
    pub fn write(&self, path: &Path) -> Result<(), EvalError> {
        std::fs::write(path, self.to_tsv()).map_err(|e| EvalError::io(path, e))?;
        let sidecar = Self::sidecar_path(path);
        let json = serde_json::to_string_pretty(&self.sidecar()).expect("json values serialize") + "\n";
        std::fs::write(&sidecar, json).map_err(|e| EvalError::io(&sidecar, e))
    }

    /// Reads a run file. The sidecar is optional so that score files from
    /// other systems can be evaluated; without one the method id is the
    /// file stem.
    pub fn read(path: &Path) -> Result<Self, EvalError> {
        let raw = std::fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
        let mut scores = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in raw.lines().enumerate() {
            let bad = |message: String| EvalError::BadRow {
                path: path.to_path_buf(),
                row: i + 1,
                message,
            };
            if line.trim().is_empty() {
                continue;
            }
            let (id, value) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected `query_id\\tscore`".into()))?;
            let score: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{value}` is not a number")))?;
            if score.is_nan() {
                return Err(EvalError::NanScore(id.to_string()));
            }
            if !seen.insert(id.to_string()) {
                return Err(bad(format!("duplicate query id `{id}`")));
            }
            scores.push((id.to_string(), score));
        }

        let sidecar = Self::sidecar_path(path);
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let (method_id, k_used, provenance) = if sidecar.exists() {
            let raw = std::fs::read_to_string(&sidecar).map_err(|e| EvalError::io(&sidecar, e))?;
            let v: Value = serde_json::from_str(&raw).map_err(|e| EvalError::BadFile {
                path: sidecar.clone(),
                message: e.to_string(),
            })?;
            (
                v["method_id"].as_str().map(str::to_string).unwrap_or(stem),
                v["k_used"].as_u64().map(|k| k as usize),
                v["provenance"].clone(),
            )
        } else {
            (stem, None, Value::Null)
        };
        Ok(PredictionRun {
            method_id,
            scores,
            k_used,
            provenance,
        })
    }
}
