//! Subprocess scorer speaking the line-delimited JSON pair protocol.
//!
//! Requests go to the child's stdin as
//! `{"pair_id": ..., "text_a": ..., "text_b": ...}`, one per line, and a
//! blank line closes each batch. The child answers every request exactly
//! once on stdout with `{"pair_id": ..., "p_isnext": ...}`, in any order.

use super::{PairRequest, ScorerError, SuccessorScorer};
use serde::Deserialize;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct ExternalOptions {
    /// Requests per protocol batch.
    pub batch_size: usize,
    /// Deadline for the child to answer one batch.
    pub timeout: Duration,
}

impl Default for ExternalOptions {
    fn default() -> Self {
        ExternalOptions {
            batch_size: 64,
            timeout: Duration::from_secs(120),
        }
    }
}

struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
}

impl Session {
    fn shutdown(mut self) {
        drop(self.stdin.take());
        let deadline = Instant::now() + Duration::from_secs(1);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub struct ExternalScorer {
    id: String,
    options: ExternalOptions,
    session: Mutex<Option<Session>>,
}

#[derive(Deserialize)]
struct Response {
    pair_id: Option<String>,
    p_isnext: Option<f64>,
    error: Option<String>,
}

impl ExternalScorer {
    /// Launches `command[0]` with the remaining elements as arguments.
    pub fn spawn(command: &[String], options: ExternalOptions) -> Result<Self, ScorerError> {
        let display = command.join(" ");
        let (program, args) = command.split_first().ok_or_else(|| ScorerError::Spawn {
            command: display.clone(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"),
        })?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| ScorerError::Spawn {
                command: display.clone(),
                source,
            })?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalScorer {
            id: format!("external:{display}"),
            options: ExternalOptions {
                batch_size: options.batch_size.max(1),
                ..options
            },
            session: Mutex::new(Some(Session {
                child,
                stdin,
                lines: rx,
            })),
        })
    }

    /// Overrides the cache identity, e.g. with a model checkpoint name.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    fn run_batch(&self, session: &mut Session, batch: &[PairRequest]) -> Result<Vec<f64>, ScorerError> {
        let mut payload = String::new();
        for req in batch {
            payload.push_str(&serde_json::to_string(req).expect("requests serialize"));
            payload.push('\n');
        }
        payload.push('\n');
        let stdin = session.stdin.as_mut().ok_or(ScorerError::Poisoned)?;
        stdin.write_all(payload.as_bytes())?;
        stdin.flush()?;

        let slot: HashMap<&str, usize> = batch.iter().enumerate().map(|(i, r)| (r.pair_id.as_str(), i)).collect();
        let mut results: Vec<Option<f64>> = vec![None; batch.len()];
        let mut missing = batch.len();
        let mut line_no = 0usize;
        let deadline = Instant::now() + self.options.timeout;
        while missing > 0 {
            let wait = deadline.saturating_duration_since(Instant::now());
            let line = match session.lines.recv_timeout(wait) {
                Ok(line) => line?,
                Err(RecvTimeoutError::Timeout) => return Err(ScorerError::Timeout(self.options.timeout)),
                Err(RecvTimeoutError::Disconnected) => return Err(ScorerError::Exited { missing }),
            };
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: String| ScorerError::Malformed { line: line_no, message };
            let resp: Response = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
            if let Some(err) = resp.error {
                return Err(ScorerError::Remote(format!("line {line_no}: {err}")));
            }
            let id = resp.pair_id.ok_or_else(|| malformed("missing pair_id".into()))?;
            let p = resp.p_isnext.ok_or_else(|| malformed("missing p_isnext".into()))?;
            let &at = slot
                .get(id.as_str())
                .ok_or_else(|| malformed(format!("unknown pair_id {id}")))?;
            if results[at].is_some() {
                return Err(malformed(format!("duplicate answer for {id}")));
            }
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(ScorerError::OutOfRange { pair_id: id, value: p });
            }
            results[at] = Some(p);
            missing -= 1;
        }
        Ok(results.into_iter().map(|p| p.expect("all answered")).collect())
    }
}

impl SuccessorScorer for ExternalScorer {
    fn scorer_id(&self) -> &str {
        &self.id
    }

    fn score_batch(&self, requests: &[PairRequest]) -> Result<Vec<f64>, ScorerError> {
        let mut guard = self.session.lock().unwrap_or_else(|e| e.into_inner());
        let session = guard.as_mut().ok_or(ScorerError::Poisoned)?;
        let mut out = Vec::with_capacity(requests.len());
        for batch in requests.chunks(self.options.batch_size) {
            match self.run_batch(session, batch) {
                Ok(probs) => out.extend(probs),
                Err(e) => {
                    // The stream may be out of step with our requests now.
                    if let Some(dead) = guard.take() {
                        dead.shutdown();
                    }
                    return Err(e);
                }
            }
        }
        Ok(out)
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        let session = self.session.get_mut().unwrap_or_else(|e| e.into_inner()).take();
        if let Some(session) = session {
            session.shutdown();
        }
    }
}
