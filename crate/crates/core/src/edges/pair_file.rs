use super::{PairRequest, ScorerError, SuccessorScorer};
use serde::Deserialize;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// Scores looked up from a file of protocol response lines, as produced by
/// an offline scorer run over requests written with [`write_pair_requests`].
#[derive(Debug)]
pub struct PairFileScorer {
    id: String,
    scores: HashMap<String, f64>,
}

#[derive(Deserialize)]
struct Line {
    pair_id: String,
    p_isnext: f64,
}

impl PairFileScorer {
    pub fn load(path: &Path) -> Result<Self, ScorerError> {
        let raw = std::fs::read_to_string(path)?;
        let mut scores = HashMap::new();
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(line).map_err(|e| ScorerError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
            if !(parsed.p_isnext.is_finite() && (0.0..=1.0).contains(&parsed.p_isnext)) {
                return Err(ScorerError::OutOfRange {
                    pair_id: parsed.pair_id,
                    value: parsed.p_isnext,
                });
            }
            scores.insert(parsed.pair_id, parsed.p_isnext);
        }
        let digest = crate::checksum::sha256_hex(raw.as_bytes());
        Ok(PairFileScorer {
            id: format!("pair-file:{}", &digest[..16]),
            scores,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

impl SuccessorScorer for PairFileScorer {
    fn scorer_id(&self) -> &str {
        &self.id
    }

    fn score_batch(&self, requests: &[PairRequest]) -> Result<Vec<f64>, ScorerError> {
        let missing: Vec<String> = requests
            .iter()
            .filter(|r| !self.scores.contains_key(&r.pair_id))
            .map(|r| r.pair_id.clone())
            .collect();
        if !missing.is_empty() {
            return Err(ScorerError::MissingPairs(missing));
        }
        Ok(requests.iter().map(|r| self.scores[&r.pair_id]).collect())
    }
}

/// Writes requests as protocol request lines.
pub fn write_pair_requests<W: Write>(mut out: W, requests: &[PairRequest]) -> std::io::Result<()> {
    for req in requests {
        serde_json::to_writer(&mut out, req)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
