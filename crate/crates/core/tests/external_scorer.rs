//! Runs the subprocess scorer against small Python mocks of the protocol.

use clarity_core::edges::{
    heuristic_successor_score, score_pairs, ExternalOptions, ExternalScorer, PairRequest, ScorerError,
};
use clarity_core::{Passage, SuccessorScorer};
use std::path::{Path, PathBuf};
use std::time::Duration;

fn has_python() -> bool {
    std::process::Command::new("python3").arg("--version").output().is_ok()
}

fn script(dir: &Path, name: &str, body: &str) -> Vec<String> {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, body).unwrap();
    vec!["python3".into(), "-u".into(), path.to_string_lossy().into_owned()]
}

const PRELUDE: &str = r#"
import json, sys

def batches():
    batch = []
    for line in sys.stdin:
        line = line.strip()
        if not line:
            yield batch
            batch = []
        else:
            batch.append(json.loads(line))

def jaccard_p(a, b):
    import math, re
    ta = set(re.findall(r"\w+", a.lower()))
    tb = set(re.findall(r"\w+", b.lower()))
    j = len(ta & tb) / len(ta | tb) if ta | tb else 0.0
    return 1 / (1 + math.exp(-8 * (j - 0.25)))
"#;

fn requests(n: usize) -> Vec<PairRequest> {
    (0..n)
        .map(|i| PairRequest::new(&format!("alpha beta {i}"), &format!("beta gamma {}", i * 7)))
        .collect()
}

#[test]
fn constant_half() {
    if !has_python() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(
        dir.path(),
        "half.py",
        &format!(
            "{PRELUDE}\nfor b in batches():\n    for r in b:\n        print(json.dumps({{'pair_id': r['pair_id'], 'p_isnext': 0.5}}))\n"
        ),
    );
    let s = ExternalScorer::spawn(
        &cmd,
        ExternalOptions {
            batch_size: 7,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(s.score_batch(&requests(50)).unwrap(), vec![0.5; 50]);
    // The session stays open across calls.
    assert_eq!(s.score_batch(&requests(3)).unwrap(), vec![0.5; 3]);
}

#[test]
fn reordered_responses_are_matched_by_id() {
    if !has_python() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(
        dir.path(),
        "rev.py",
        &format!(
            "{PRELUDE}\nfor b in batches():\n    for r in reversed(b):\n        print(json.dumps({{'pair_id': r['pair_id'], 'p_isnext': jaccard_p(r['text_a'], r['text_b'])}}))\n"
        ),
    );
    let s = ExternalScorer::spawn(&cmd, ExternalOptions::default())
        .unwrap()
        .with_id("mock-jaccard");
    assert_eq!(s.scorer_id(), "mock-jaccard");
    let reqs = requests(20);
    let got = s.score_batch(&reqs).unwrap();
    for (r, p) in reqs.iter().zip(got) {
        assert!((p - heuristic_successor_score(&r.text_a, &r.text_b)).abs() < 1e-12);
    }

    let ps: Vec<Passage> = (0..4)
        .map(|i| Passage::new(format!("d{i}"), format!("one two three w{i}")))
        .collect();
    let set = score_pairs("q", &ps, &s, None).unwrap();
    assert!((set.probs[0][1] - heuristic_successor_score(&ps[0].text, &ps[1].text)).abs() < 1e-12);
}

#[test]
fn malformed_line_is_reported_with_its_number() {
    if !has_python() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(
        dir.path(),
        "bad.py",
        &format!(
            "{PRELUDE}\nfor b in batches():\n    print(json.dumps({{'pair_id': b[0]['pair_id'], 'p_isnext': 0.1}}))\n    print('this is not json')\n"
        ),
    );
    let s = ExternalScorer::spawn(&cmd, ExternalOptions::default()).unwrap();
    match s.score_batch(&requests(3)) {
        Err(ScorerError::Malformed { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(s.score_batch(&requests(1)), Err(ScorerError::Poisoned)));
}

#[test]
fn out_of_range_and_unknown_ids_are_rejected() {
    if !has_python() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(
        dir.path(),
        "range.py",
        &format!(
            "{PRELUDE}\nfor b in batches():\n    print(json.dumps({{'pair_id': b[0]['pair_id'], 'p_isnext': 1.7}}))\n"
        ),
    );
    let s = ExternalScorer::spawn(&cmd, ExternalOptions::default()).unwrap();
    assert!(matches!(
        s.score_batch(&requests(1)),
        Err(ScorerError::OutOfRange { .. })
    ));

    let cmd = script(
        dir.path(),
        "unknown.py",
        &format!("{PRELUDE}\nfor b in batches():\n    print(json.dumps({{'pair_id': 'nope', 'p_isnext': 0.3}}))\n"),
    );
    let s = ExternalScorer::spawn(&cmd, ExternalOptions::default()).unwrap();
    assert!(matches!(
        s.score_batch(&requests(1)),
        Err(ScorerError::Malformed { line: 1, .. })
    ));
}

#[test]
fn silent_scorer_times_out() {
    if !has_python() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(
        dir.path(),
        "sleep.py",
        "import sys, time\nfor line in sys.stdin:\n    time.sleep(30)\n",
    );
    let s = ExternalScorer::spawn(
        &cmd,
        ExternalOptions {
            batch_size: 4,
            timeout: Duration::from_millis(300),
        },
    )
    .unwrap();
    let started = std::time::Instant::now();
    assert!(matches!(s.score_batch(&requests(2)), Err(ScorerError::Timeout(_))));
    assert!(started.elapsed() < Duration::from_secs(10));
}

#[test]
fn early_exit_and_missing_program() {
    if !has_python() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(dir.path(), "exit.py", "import sys\nsys.stdin.readline()\n");
    let s = ExternalScorer::spawn(&cmd, ExternalOptions::default()).unwrap();
    assert!(matches!(
        s.score_batch(&requests(2)),
        Err(ScorerError::Exited { missing: 2 }) | Err(ScorerError::Io(_))
    ));
    assert!(matches!(
        ExternalScorer::spawn(&["/nonexistent/scorer".into()], ExternalOptions::default()),
        Err(ScorerError::Spawn { .. })
    ));
}
