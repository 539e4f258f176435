mod common;

use clarity_testkit::synthetic::five_topic_fixture;
use common::*;
use serde_json::Value;
use std::path::Path;

fn index_dir(dir: &Path, corpus: &Path) -> std::path::PathBuf {
    let idx = dir.join("idx");
    clarity(["index", "--corpus", &s(corpus), "--out", &s(&idx)]).ok();
    idx
}

#[test]
fn index_writes_metadata_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, _) = synthetic_inputs(dir.path(), &five_topic_fixture(1));
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = clarity(["index", "--corpus", &s(&corpus), "--out", &s(&a)]);
    assert!(out.ok().stdout.contains("indexed 100 passages"));
    clarity(["index", "--corpus", &s(&corpus), "--out", &s(&b)]).ok();
    let meta = |d: &Path| serde_json::from_str::<Value>(&read(&d.join("meta.json"))).unwrap();
    assert_eq!(meta(&a)["index_sha256"], meta(&b)["index_sha256"]);
    assert_eq!(meta(&a)["doc_count"], 100);
    assert_eq!(
        read(&a.join("manifest.json")).replace(&s(&a), ""),
        read(&b.join("manifest.json")).replace(&s(&b), "")
    );
}

#[test]
fn index_rejects_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.tsv", "p1\tone two\np2\tthree\np1\tfour\n");
    let out = clarity(["index", "--corpus", &s(&corpus), "--out", &s(&dir.path().join("i"))]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("index") && out.stderr.contains("p1"),
        "{}",
        out.stderr
    );
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(clarity(["predict", "--no-such-flag"]).code, 1);
    assert_eq!(clarity(["index", "--k", "0", "--out", &s(dir.path())]).code, 1);
    assert_eq!(
        clarity(["index", "--corpus", "/no/such/corpus.tsv", "--out", &s(dir.path())]).code,
        1
    );
    assert_eq!(clarity(["index", "--threshold", "2", "--out", &s(dir.path())]).code, 1);
    assert_eq!(clarity(["--help"]).code, 0);
}

#[test]
fn predict_scopes_the_scorer_to_graph_methods() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, queries) = synthetic_inputs(dir.path(), &five_topic_fixture(2));
    let idx = index_dir(dir.path(), &corpus);
    let out = dir.path().join("run");
    let base = [
        "predict",
        "--index",
        &s(&idx),
        "--dataset",
        &s(&queries),
        "--out",
        &s(&out),
    ];
    clarity(base.iter().copied().chain(["--method", "nqc"])).ok();
    assert_eq!(run_scores(&out.join("nqc.tsv")).len(), 40);
    assert!(out.join("nqc.provenance.json").exists() && out.join("nqc.manifest.json").exists());

    let missing = clarity(base.iter().copied().chain(["--method", "anc"]));
    assert_eq!(missing.code, 1, "{}", missing.stderr);
    assert!(missing.stderr.contains("--scorer"));
}

#[test]
fn warm_cache_makes_no_scorer_calls() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, queries) = synthetic_inputs(dir.path(), &five_topic_fixture(3));
    let cache = dir.path().join("cache");
    let args = |out: &str| {
        vec![
            "predict".to_string(),
            "--corpus".into(),
            s(&corpus),
            "--dataset".into(),
            s(&queries),
            "--method".into(),
            "anc".into(),
            "--scorer".into(),
            "heuristic".into(),
            "--k".into(),
            "10".into(),
            "--cache-dir".into(),
            s(&cache),
            "--out".into(),
            s(&dir.path().join(out)),
        ]
    };
    let cold = clarity(args("cold"));
    assert!(!cold.ok().stderr.contains(" 0 call(s)"), "{}", cold.stderr);
    let warm = clarity(args("warm"));
    assert!(
        warm.ok().stderr.contains("0 call(s), 0 pair(s) scored"),
        "{}",
        warm.stderr
    );
    assert_eq!(
        read(&dir.path().join("cold/anc.tsv")),
        read(&dir.path().join("warm/anc.tsv"))
    );

    // The environment variable is the default cache location.
    let via_env = std::process::Command::new(env!("CARGO_BIN_EXE_clarity"))
        .args(&args("env")[..args("env").len() - 4])
        .args(["--out", &s(&dir.path().join("env"))])
        .env("CLARITY_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&via_env.stderr).contains("0 call(s)"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    synthetic_inputs(dir.path(), &five_topic_fixture(4));
    let cfg = write(
        dir.path(),
        "run.toml",
        "corpus = \"corpus.tsv\"\ndataset = \"queries.tsv\"\nmethod = \"nc\"\nscorer = \"heuristic\"\nk = 5\nout = \"out\"\n",
    );
    clarity(["predict", "--config", &s(&cfg), "--k", "8"]).ok();
    let sidecar: Value = serde_json::from_str(&read(&dir.path().join("out/nc.provenance.json"))).unwrap();
    assert_eq!(sidecar["k_used"], 8);
    let manifest: Value = serde_json::from_str(&read(&dir.path().join("out/nc.manifest.json"))).unwrap();
    assert_eq!(manifest["config"]["k"], 8);
    assert_eq!(manifest["inputs"]["dataset"]["sha256"].as_str().unwrap().len(), 64);
    let bad = write(dir.path(), "bad.toml", "depth = 3\n");
    assert_eq!(clarity(["predict", "--config", &s(&bad)]).code, 1);
}

#[test]
fn evaluate_reports_auc_and_pairwise_p_values() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, queries) = synthetic_inputs(dir.path(), &five_topic_fixture(5));
    let runs = dir.path().join("runs");
    for m in ["anc", "nqc"] {
        clarity([
            "predict",
            "--corpus",
            &s(&corpus),
            "--dataset",
            &s(&queries),
            "--method",
            m,
            "--scorer",
            "heuristic",
            "--k",
            "10",
            "--out",
            &s(&runs),
        ])
        .ok();
    }
    let one = dir.path().join("one");
    clarity([
        "evaluate",
        "--dataset",
        &s(&queries),
        "--run",
        &s(&runs.join("anc.tsv")),
        "--out",
        &s(&one),
    ])
    .ok();
    let report: Value = serde_json::from_str(&read(&one.join("report.json"))).unwrap();
    assert_eq!(report["reports"].as_array().unwrap().len(), 1);
    assert!(report["comparisons"].as_array().unwrap().is_empty());
    assert!(read(&one.join("anc.roc.csv")).starts_with("fpr,tpr\n0,0\n"));

    let two = dir.path().join("two");
    clarity([
        "evaluate",
        "--dataset",
        &s(&queries),
        "--run",
        &s(&runs.join("anc.tsv")),
        "--run",
        &s(&runs.join("nqc.tsv")),
        "--resamples",
        "500",
        "--out",
        &s(&two),
    ])
    .ok();
    let report: Value = serde_json::from_str(&read(&two.join("report.json"))).unwrap();
    let cmp = &report["comparisons"][0];
    assert_eq!(
        (cmp["method_a"].as_str(), cmp["method_b"].as_str()),
        (Some("anc"), Some("nqc"))
    );
    let p = cmp["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(report["reports"][0]["p_values"]["nqc"].as_f64(), Some(p));
}

#[test]
fn evaluate_lists_missing_queries() {
    let dir = tempfile::tempdir().unwrap();
    let queries = write(dir.path(), "q.tsv", CLARIQ_FIXTURE);
    let run = write(dir.path(), "partial.tsv", "201\t0.5\n202\t0.1\n203\t0.9\n204\t0.2\n");
    let out = clarity([
        "evaluate",
        "--dataset",
        &s(&queries),
        "--run",
        &s(&run),
        "--out",
        &s(&dir.path().join("e")),
    ]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("205") && out.stderr.contains("206"),
        "{}",
        out.stderr
    );
}

#[test]
fn bucket_mode_matches_hand_count() {
    let dir = tempfile::tempdir().unwrap();
    let ambig = write(dir.path(), "ambig.json", AMBIGNQ_FIXTURE);
    let run = write(
        dir.path(),
        "scores.tsv",
        "n1\t0.1\nn2\t0.7\nn3\t0.4\nn4\t0.9\nn5\t0.2\nn6\t0.8\n",
    );
    let out = dir.path().join("b");
    clarity([
        "evaluate",
        "--dataset",
        &s(&ambig),
        "--run",
        &s(&run),
        "--bucket-threshold",
        "0.5",
        "--out",
        &s(&out),
    ])
    .ok();
    // Buckets: 1 = {n1 0.1, n6 0.8}, 2 = {n2 0.7}, 3 = {n3 0.4}, 4+ = {n4 0.9, n5 0.2}.
    assert_eq!(
        read(&out.join("scores.buckets.csv")),
        "bucket,queries,predicted_ambiguous,percent\n1,2,1,50\n2,1,1,100\n3,1,0,0\n4+,2,1,50\n"
    );

    // Dev-selected threshold: the dev run separates perfectly at 0.3.
    let dev = write(dir.path(), "dev.tsv", CLARIQ_FIXTURE);
    let dev_run = write(
        dir.path(),
        "dev_scores.tsv",
        "201\t0.3\n202\t0.6\n203\t0.1\n204\t0.8\n205\t0.7\n206\t0.2\n",
    );
    let out = dir.path().join("d");
    clarity([
        "evaluate",
        "--dataset",
        &s(&ambig),
        "--run",
        &s(&run),
        "--dev-run",
        &s(&dev_run),
        "--dev-dataset",
        &s(&dev),
        "--out",
        &s(&out),
    ])
    .ok();
    let report: Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    let table = &report["bucket_reports"][0];
    assert_eq!(table["threshold"].as_f64(), Some(0.3));
    assert_eq!(table["threshold_source"], "dev-youden");
    assert_eq!(table["buckets"]["3"]["percent"].as_f64(), Some(100.0));
}

#[test]
fn sweep_writes_table_and_selection() {
    let dir = tempfile::tempdir().unwrap();
    let f = clarity_testkit::synthetic::depth_fixture();
    let (corpus, queries) = synthetic_inputs(dir.path(), &f);
    let out = dir.path().join("s");
    clarity([
        "sweep",
        "--corpus",
        &s(&corpus),
        "--dataset",
        &s(&queries),
        "--method",
        "anc",
        "--scorer",
        "heuristic",
        "--ks",
        "20,10",
        "--out",
        &s(&out),
    ])
    .ok();
    assert_eq!(read(&out.join("sweep_anc.csv")), "k,auc\n10,1\n20,0\n");
    let sel = out.join("sweep_anc.json");
    let doc: Value = serde_json::from_str(&read(&sel)).unwrap();
    assert_eq!(doc["selected_k"], 10);

    let run = dir.path().join("r");
    clarity([
        "predict",
        "--corpus",
        &s(&corpus),
        "--dataset",
        &s(&queries),
        "--method",
        "anc",
        "--scorer",
        "heuristic",
        "--k-from",
        &s(&sel),
        "--out",
        &s(&run),
    ])
    .ok();
    let sidecar: Value = serde_json::from_str(&read(&run.join("anc.provenance.json"))).unwrap();
    assert_eq!(sidecar["k_used"], 10);
    assert!(sidecar["provenance"]["k_selected_by_sweep_sha256"].is_string());
}

#[test]
fn export_graph_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, queries) = synthetic_inputs(dir.path(), &clarity_testkit::synthetic::depth_fixture());
    let out = dir.path().join("g");
    let args = |q: &str| {
        vec![
            "export-graph".to_string(),
            "--corpus".into(),
            s(&corpus),
            "--dataset".into(),
            s(&queries),
            "--scorer".into(),
            "heuristic".into(),
            "--k".into(),
            "10".into(),
            "--query-id".into(),
            q.into(),
            "--out".into(),
            s(&out),
        ]
    };
    clarity(args("ambig1")).ok();
    let dot = read(&out.join("ambig1.dot"));
    assert!(dot.starts_with("digraph coherency {\n"));
    assert_eq!(dot.matches(" -> ").count(), 40);
    assert_eq!(dot.matches("[label=").count(), 10);
    assert_eq!(clarity(args("nope")).code, 2);
}

#[test]
fn offline_pair_file_matches_inline_scoring() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, queries) = synthetic_inputs(dir.path(), &five_topic_fixture(8));
    let requests = dir.path().join("requests.jsonl");
    let base = |extra: &[&str], out: &str| {
        let mut v = vec![
            "predict".to_string(),
            "--corpus".into(),
            s(&corpus),
            "--dataset".into(),
            s(&queries),
            "--method".into(),
            "anc".into(),
            "--k".into(),
            "10".into(),
            "--out".into(),
            s(&dir.path().join(out)),
        ];
        v.extend(extra.iter().map(|x| x.to_string()));
        v
    };
    clarity(base(&["--emit-pair-requests", &s(&requests)], "emit")).ok();
    let mut answers = String::new();
    for line in read(&requests).lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        let p = clarity_core::edges::heuristic_successor_score(
            r["text_a"].as_str().unwrap(),
            r["text_b"].as_str().unwrap(),
        );
        answers.push_str(&serde_json::json!({"pair_id": r["pair_id"], "p_isnext": p}).to_string());
        answers.push('\n');
    }
    let scores = write(dir.path(), "scores.jsonl", &answers);
    clarity(base(&["--scorer", &format!("pair-file:{}", s(&scores))], "file")).ok();
    clarity(base(&["--scorer", "heuristic"], "inline")).ok();
    assert_eq!(
        read(&dir.path().join("file/anc.tsv")),
        read(&dir.path().join("inline/anc.tsv"))
    );
}

#[test]
fn scorer_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let (corpus, queries) = synthetic_inputs(dir.path(), &five_topic_fixture(9));
    let incomplete = write(dir.path(), "empty.jsonl", "");
    let out = clarity([
        "predict",
        "--corpus",
        &s(&corpus),
        "--dataset",
        &s(&queries),
        "--method",
        "nc",
        "--scorer",
        &format!("pair-file:{}", s(&incomplete)),
        "--out",
        &s(&dir.path().join("o")),
    ]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stderr.contains("query"), "{}", out.stderr);

    if std::process::Command::new("python3").arg("--version").output().is_ok() {
        let script = write(dir.path(), "dies.py", "import sys\nsys.exit(0)\n");
        let out = clarity([
            "predict",
            "--corpus",
            &s(&corpus),
            "--dataset",
            &s(&queries),
            "--method",
            "anc",
            "--scorer",
            &format!("external:python3 {}", s(&script)),
            "--workers",
            "1",
            "--out",
            &s(&dir.path().join("x")),
        ]);
        assert_eq!(out.code, 3, "{}", out.stderr);
    }
}
