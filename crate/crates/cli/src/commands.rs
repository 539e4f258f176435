use crate::config::{RunConfig, ScorerSpec, DEFAULT_BATCH_SIZE, DEFAULT_SCORER_TIMEOUT_SECS};
use crate::failure::{Failure, Stage};
use clarity_core::checksum::file_sha256;
use clarity_core::corpus::{build_index, load_index, read_corpus_tsv, save_index, INDEX_FILE, METADATA_FILE};
use clarity_core::edges::{
    pair_requests, write_pair_requests, ExternalOptions, ExternalScorer, HeuristicScorer, PairCache, PairFileScorer,
    PairRequest, ScorerError,
};
use clarity_core::eval::{
    align, bucket_report, load_ambignq, load_clariq, load_clariq_requests, paired_significance, roc_and_auc,
    select_threshold, BootstrapOptions, Comparison, EvalReport, LabeledQuery, PredictionRun, Split,
};
use clarity_core::graph::export_dot;
use clarity_core::pipeline::{Method, Pipeline, SweepResult};
use clarity_core::{CoherencyNetwork, Index, SuccessorScorer};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

type CmdResult<T = ()> = Result<T, Failure>;

/// Accumulates the manifest written next to every command's outputs.
struct Manifest {
    command: &'static str,
    file_name: String,
    config: RunConfig,
    inputs: BTreeMap<String, Value>,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    fn new(command: &'static str, cfg: &RunConfig) -> Self {
        Manifest {
            command,
            file_name: "manifest.json".into(),
            config: cfg.resolved(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, name: impl Into<String>, path: &Path) -> CmdResult<String> {
        let sha = file_sha256(path).map_err(Failure::data(Stage::Inputs))?;
        self.inputs.insert(name.into(), json!({ "path": path, "sha256": sha }));
        Ok(sha)
    }

    fn write_output(&mut self, path: PathBuf, contents: impl AsRef<[u8]>) -> CmdResult {
        std::fs::write(&path, contents)
            .map_err(|e| Failure::data(Stage::Output)(anyhow::Error::new(e).context(path.display().to_string())))?;
        self.outputs.push(path);
        Ok(())
    }

    fn finish(self, out: &Path) -> CmdResult {
        let mut outputs = BTreeMap::new();
        for p in &self.outputs {
            let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            outputs.insert(name, file_sha256(p).map_err(Failure::data(Stage::Output))?);
        }
        let doc = json!({
            "tool": "clarity",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": outputs,
        });
        let text = serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n";
        std::fs::write(out.join(&self.file_name), text).map_err(Failure::data(Stage::Output))
    }
}

fn out_dir(cfg: &RunConfig) -> CmdResult<PathBuf> {
    let out = cfg.out.clone().ok_or_else(|| Failure::usage("--out is required"))?;
    std::fs::create_dir_all(&out)
        .map_err(|e| Failure::data(Stage::Output)(anyhow::Error::new(e).context(out.display().to_string())))?;
    Ok(out)
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("values serialize") + "\n"
}

pub fn index(cfg: &RunConfig) -> CmdResult {
    let corpus = cfg
        .corpus
        .clone()
        .ok_or_else(|| Failure::usage("--corpus is required"))?;
    let out = out_dir(cfg)?;
    let mut manifest = Manifest::new("index", cfg);
    manifest.input("corpus", &corpus)?;
    let passages = read_corpus_tsv(&corpus).map_err(Failure::data(Stage::Index))?;
    let index = build_index(passages, cfg.bm25()).map_err(Failure::data(Stage::Index))?;
    let meta = save_index(&index, &out).map_err(Failure::data(Stage::Index))?;
    manifest.outputs.push(out.join(INDEX_FILE));
    manifest.outputs.push(out.join(METADATA_FILE));
    manifest.finish(&out)?;
    println!(
        "indexed {} passages, {} terms -> {}",
        meta.doc_count,
        meta.term_count,
        out.display()
    );
    Ok(())
}

/// Loads `--index`, or builds one in memory from `--corpus`. Returns the
/// index with a checksum identifying its content.
fn open_index(cfg: &RunConfig, manifest: &mut Manifest) -> CmdResult<(Index, String)> {
    if let Some(dir) = &cfg.index {
        manifest.input("index", &dir.join(INDEX_FILE))?;
        let (index, meta) = load_index(dir).map_err(Failure::data(Stage::Index))?;
        return Ok((index, meta.index_sha256));
    }
    if let Some(corpus) = &cfg.corpus {
        let sha = manifest.input("corpus", corpus)?;
        let passages = read_corpus_tsv(corpus).map_err(Failure::data(Stage::Index))?;
        let index = build_index(passages, cfg.bm25()).map_err(Failure::data(Stage::Index))?;
        return Ok((index, sha));
    }
    Err(Failure::usage("one of --index or --corpus is required"))
}

fn is_ambignq(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn open_dataset(
    path: &Path,
    split: Split,
    labelled: bool,
    name: &str,
    manifest: &mut Manifest,
) -> CmdResult<(Vec<LabeledQuery>, String)> {
    let sha = manifest.input(name, path)?;
    let queries = if is_ambignq(path) {
        load_ambignq(path, split).map(|l| l.queries)
    } else if labelled {
        load_clariq(path, split)
    } else {
        load_clariq_requests(path, split)
    }
    .map_err(Failure::data(Stage::Dataset))?;
    Ok((queries, sha))
}

fn dataset_path(cfg: &RunConfig) -> CmdResult<PathBuf> {
    cfg.dataset
        .clone()
        .ok_or_else(|| Failure::usage("--dataset is required"))
}

fn method(cfg: &RunConfig) -> CmdResult<Method> {
    cfg.method.ok_or_else(|| Failure::usage("--method is required"))
}

/// Counts what actually reaches the underlying scorer.
struct Metered {
    inner: Box<dyn SuccessorScorer>,
    calls: AtomicUsize,
    pairs: AtomicUsize,
}

impl SuccessorScorer for Metered {
    fn scorer_id(&self) -> &str {
        self.inner.scorer_id()
    }

    fn score_batch(&self, requests: &[PairRequest]) -> Result<Vec<f64>, ScorerError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.pairs.fetch_add(requests.len(), Ordering::Relaxed);
        self.inner.score_batch(requests)
    }
}

fn open_scorer(cfg: &RunConfig, manifest: &mut Manifest) -> CmdResult<Option<Metered>> {
    let Some(spec) = &cfg.scorer else { return Ok(None) };
    let inner: Box<dyn SuccessorScorer> = match ScorerSpec::parse(spec).map_err(|e| Failure::usage(e.to_string()))? {
        ScorerSpec::Heuristic => Box::new(HeuristicScorer::new()),
        ScorerSpec::PairFile(path) => {
            manifest.input("pair_file", &path)?;
            Box::new(PairFileScorer::load(&path).map_err(Failure::scorer(Stage::Scorer))?)
        }
        ScorerSpec::External(argv) => {
            let options = ExternalOptions {
                batch_size: cfg.batch_size.unwrap_or(DEFAULT_BATCH_SIZE),
                timeout: Duration::from_secs(cfg.scorer_timeout_secs.unwrap_or(DEFAULT_SCORER_TIMEOUT_SECS)),
            };
            Box::new(ExternalScorer::spawn(&argv, options).map_err(Failure::scorer(Stage::Scorer))?)
        }
    };
    Ok(Some(Metered {
        inner,
        calls: AtomicUsize::new(0),
        pairs: AtomicUsize::new(0),
    }))
}

fn open_cache(cfg: &RunConfig) -> CmdResult<PairCache> {
    match &cfg.cache_dir {
        Some(dir) => PairCache::open(dir).map_err(Failure::data(Stage::Cache)),
        None => Ok(PairCache::in_memory()),
    }
}

fn report_scorer_use(scorer: Option<&Metered>) {
    if let Some(s) = scorer {
        eprintln!(
            "scorer {}: {} call(s), {} pair(s) scored",
            s.scorer_id(),
            s.calls.load(Ordering::Relaxed),
            s.pairs.load(Ordering::Relaxed)
        );
    }
}

/// Settings that shape a run's scores, minus anything machine-specific.
fn provenance(cfg: &RunConfig, method: Method, index_sha: &str, dataset_sha: &str, scorer: Option<&Metered>) -> Value {
    let mut p = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "method": method.id(),
        "k": cfg.k(),
        "bm25": cfg.bm25(),
        "index_sha256": index_sha,
        "dataset_sha256": dataset_sha,
        "direction": "higher = more ambiguous",
    });
    if method.needs_scorer() {
        p["edge_threshold"] = json!(cfg.threshold());
        p["scorer"] = json!(scorer.map(|s| s.scorer_id()));
    }
    if method == Method::NSigma {
        p["n_sigma_percent"] = json!(cfg.n_sigma_percent());
    }
    p
}

pub struct PredictOptions {
    pub emit_pair_requests: Option<PathBuf>,
    pub k_from: Option<PathBuf>,
}

pub fn predict(cfg: &RunConfig, opts: &PredictOptions) -> CmdResult {
    let mut cfg = cfg.clone();
    let method = method(&cfg)?;
    let out = out_dir(&cfg)?;
    let mut manifest = Manifest::new("predict", &cfg);
    // Several methods may share one output directory.
    manifest.file_name = format!("{}.manifest.json", method.id());
    let mut selected_by = None;
    if let Some(path) = &opts.k_from {
        let sha = manifest.input("sweep", path)?;
        let raw = std::fs::read_to_string(path).map_err(Failure::data(Stage::Inputs))?;
        let sweep: Value = serde_json::from_str(&raw).map_err(Failure::data(Stage::Inputs))?;
        let k = sweep["selected_k"]
            .as_u64()
            .ok_or_else(|| Failure::usage(format!("{} has no selected_k", path.display())))?;
        cfg.k = Some(k as usize);
        manifest.config.k = cfg.k;
        selected_by = Some(sha);
    }
    let (index, index_sha) = open_index(&cfg, &mut manifest)?;
    let split = cfg.split_or(Split::Test);
    let (dataset, dataset_sha) = open_dataset(&dataset_path(&cfg)?, split, false, "dataset", &mut manifest)?;
    let queries: Vec<_> = dataset.iter().map(LabeledQuery::query).collect();
    let pipeline = Pipeline::new(&index, cfg.pipeline());

    if let Some(path) = &opts.emit_pair_requests {
        if !method.needs_scorer() {
            return Err(Failure::usage(format!("method {method} scores no passage pairs")));
        }
        let mut seen = HashSet::new();
        let mut requests = Vec::new();
        for q in &queries {
            let ranked = pipeline.retrieve(q, cfg.k());
            let passages: Vec<_> = ranked
                .entries
                .iter()
                .filter_map(|e| index.passage(&e.passage_id))
                .collect();
            requests.extend(
                pair_requests(&passages)
                    .into_iter()
                    .filter(|r| seen.insert(r.pair_id.clone())),
            );
        }
        let mut buf = Vec::new();
        write_pair_requests(&mut buf, &requests).map_err(Failure::data(Stage::Output))?;
        manifest.write_output(path.clone(), buf)?;
        manifest.finish(&out)?;
        println!(
            "wrote {} pair request(s) for {} queries -> {}",
            requests.len(),
            queries.len(),
            path.display()
        );
        return Ok(());
    }

    let scorer = if method.needs_scorer() {
        Some(
            open_scorer(&cfg, &mut manifest)?
                .ok_or_else(|| Failure::usage(format!("method {method} needs --scorer")))?,
        )
    } else {
        None
    };
    let cache = open_cache(&cfg)?;
    let mut pipeline = pipeline.with_cache(&cache);
    if let Some(s) = &scorer {
        pipeline = pipeline.with_scorer(s);
    }
    let scores = pipeline
        .run(&queries, method)
        .map_err(Failure::pipeline(Stage::Predict))?;
    report_scorer_use(scorer.as_ref());

    let unscoreable: Vec<&str> = scores
        .iter()
        .filter(|s| s.raw.is_none())
        .map(|s| s.query_id.as_str())
        .collect();
    let mut prov = provenance(&cfg, method, &index_sha, &dataset_sha, scorer.as_ref());
    prov["split"] = json!(split);
    prov["unscoreable"] = json!(unscoreable);
    if let Some(sha) = selected_by {
        prov["k_selected_by_sweep_sha256"] = json!(sha);
    }
    let run = PredictionRun {
        method_id: method.id().to_string(),
        scores: scores.iter().map(|s| (s.query_id.clone(), s.ambiguity)).collect(),
        k_used: Some(cfg.k()),
        provenance: prov,
    };
    let run_path = out.join(format!("{}.tsv", method.id()));
    run.write(&run_path).map_err(Failure::data(Stage::Output))?;
    manifest.outputs.push(run_path.clone());
    manifest.outputs.push(PredictionRun::sidecar_path(&run_path));

    if method.needs_scorer() {
        let mut lines = String::new();
        for s in &scores {
            let line = match &s.connectivity {
                Some(r) => json!({"query_id": s.query_id, "retrieved": s.retrieved, "n_nodes": r.n_nodes,
                                  "n_edges": r.n_edges, "nc": r.nc, "anc": r.anc}),
                None => json!({"query_id": s.query_id, "retrieved": s.retrieved, "unscoreable": true}),
            };
            lines.push_str(&line.to_string());
            lines.push('\n');
        }
        manifest.write_output(out.join("connectivity.jsonl"), lines)?;
    }
    manifest.finish(&out)?;
    println!(
        "scored {} queries with {} ({} unscoreable) -> {}",
        scores.len(),
        method,
        unscoreable.len(),
        run_path.display()
    );
    Ok(())
}

pub struct EvaluateOptions {
    pub runs: Vec<PathBuf>,
    pub bucket_threshold: Option<f64>,
    pub dev_runs: Vec<PathBuf>,
    pub dev_dataset: Option<PathBuf>,
}

fn read_runs(paths: &[PathBuf], prefix: &str, manifest: &mut Manifest) -> CmdResult<Vec<(String, PredictionRun)>> {
    let mut runs = Vec::new();
    let mut names = HashSet::new();
    for (i, path) in paths.iter().enumerate() {
        manifest.input(format!("{prefix}{i}"), path)?;
        let run = PredictionRun::read(path).map_err(Failure::data(Stage::Evaluate))?;
        let mut name = run.method_id.clone();
        if !names.insert(name.clone()) {
            name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            if !names.insert(name.clone()) {
                return Err(Failure::usage(format!("two runs are both named `{name}`")));
            }
        }
        runs.push((name, run));
    }
    Ok(runs)
}

fn binary_labels(queries: &[LabeledQuery]) -> CmdResult<BTreeMap<String, bool>> {
    queries
        .iter()
        .map(|q| {
            q.needs_clarification().map(|l| (q.query_id.clone(), l)).ok_or_else(|| {
                Failure::data(Stage::Dataset)(anyhow::anyhow!("query `{}` has no clarity label", q.query_id))
            })
        })
        .collect()
}

pub fn evaluate(cfg: &RunConfig, opts: &EvaluateOptions) -> CmdResult {
    if opts.runs.is_empty() {
        return Err(Failure::usage("at least one --run is required"));
    }
    let out = out_dir(cfg)?;
    let mut manifest = Manifest::new("evaluate", cfg);
    let dataset = dataset_path(cfg)?;
    let split = cfg.split_or(Split::Test);
    let runs = read_runs(&opts.runs, "run", &mut manifest)?;
    let (queries, _) = open_dataset(&dataset, split, true, "dataset", &mut manifest)?;

    if is_ambignq(&dataset) {
        return evaluate_buckets(opts, &queries, &runs, manifest, &out);
    }

    let labels = binary_labels(&queries)?;
    let mut aligned = Vec::new();
    let mut reports = Vec::new();
    for (name, run) in &runs {
        let (_, scores, labs) = align(&run.score_map(), &labels)
            .map_err(|e| Failure::data(Stage::Evaluate)(anyhow::Error::new(e).context(format!("run `{name}`"))))?;
        let roc = roc_and_auc(&scores, &labs).map_err(Failure::data(Stage::Evaluate))?;
        reports.push(EvalReport::from_roc(name, roc));
        aligned.push((scores, labs));
    }
    let options = BootstrapOptions {
        resamples: cfg.resamples(),
        seed: cfg.seed(),
        ..Default::default()
    };
    let mut comparisons = Vec::new();
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            let result = paired_significance(&aligned[a].0, &aligned[b].0, &aligned[a].1, options)
                .map_err(Failure::data(Stage::Evaluate))?;
            reports[a].p_values.insert(runs[b].0.clone(), result.p_value);
            reports[b].p_values.insert(runs[a].0.clone(), result.p_value);
            comparisons.push(Comparison {
                method_a: runs[a].0.clone(),
                method_b: runs[b].0.clone(),
                result,
            });
        }
    }
    for r in &reports {
        manifest.write_output(out.join(format!("{}.roc.csv", r.method_id)), r.roc_csv())?;
        println!("{}\tauc={:.4}\tpos={}\tneg={}", r.method_id, r.auc, r.n_pos, r.n_neg);
    }
    for c in &comparisons {
        println!(
            "{} vs {}\tdiff={:+.4}\tp={:.4}",
            c.method_a, c.method_b, c.result.observed_diff, c.result.p_value
        );
    }
    let doc = json!({ "split": split, "reports": reports, "comparisons": comparisons });
    manifest.write_output(out.join("report.json"), pretty_json(&doc))?;
    manifest.finish(&out)
}

fn evaluate_buckets(
    opts: &EvaluateOptions,
    queries: &[LabeledQuery],
    runs: &[(String, PredictionRun)],
    mut manifest: Manifest,
    out: &Path,
) -> CmdResult {
    let thresholds: Vec<(f64, &'static str)> = match (opts.bucket_threshold, &opts.dev_dataset) {
        (Some(t), None) if opts.dev_runs.is_empty() => vec![(t, "fixed"); runs.len()],
        (None, Some(dev)) => {
            if opts.dev_runs.len() != runs.len() {
                return Err(Failure::usage("give one --dev-run per --run, in the same order"));
            }
            let dev_runs = read_runs(&opts.dev_runs, "dev_run", &mut manifest)?;
            let (dev_queries, _) = open_dataset(dev, Split::Dev, true, "dev_dataset", &mut manifest)?;
            let labels = binary_labels(&dev_queries)?;
            dev_runs
                .iter()
                .map(|(name, run)| {
                    let (_, s, l) = align(&run.score_map(), &labels).map_err(|e| {
                        Failure::data(Stage::Evaluate)(anyhow::Error::new(e).context(format!("dev run `{name}`")))
                    })?;
                    let t = select_threshold(&s, &l).map_err(Failure::data(Stage::Evaluate))?;
                    Ok((t, "dev-youden"))
                })
                .collect::<CmdResult<_>>()?
        }
        _ => {
            return Err(Failure::usage(
                "bucket mode needs either --bucket-threshold or --dev-dataset with --dev-run",
            ))
        }
    };
    let buckets: BTreeMap<String, u32> = queries
        .iter()
        .map(|q| (q.query_id.clone(), q.bucket.expect("AmbigNQ queries carry buckets")))
        .collect();
    let mut tables = Vec::new();
    for ((name, run), (threshold, source)) in runs.iter().zip(thresholds) {
        let scores = run.score_map();
        let unknown: Vec<&String> = scores.keys().filter(|id| !buckets.contains_key(*id)).collect();
        if !unknown.is_empty() {
            return Err(Failure::data(Stage::Evaluate)(anyhow::anyhow!(
                "run `{name}` scores {} queries that are not in the dataset, e.g. `{}`",
                unknown.len(),
                unknown[0]
            )));
        }
        let table = bucket_report(&scores, &buckets, threshold)
            .map_err(|e| Failure::data(Stage::Evaluate)(anyhow::Error::new(e).context(format!("run `{name}`"))))?;
        let mut csv = String::from("bucket,queries,predicted_ambiguous,percent\n");
        for (b, stat) in &table {
            let label = if *b == 4 { "4+".to_string() } else { b.to_string() };
            csv.push_str(&format!(
                "{label},{},{},{}\n",
                stat.queries, stat.predicted_ambiguous, stat.percent
            ));
            println!("{name}\tbucket {label}\t{:.1}% of {}", stat.percent, stat.queries);
        }
        manifest.write_output(out.join(format!("{name}.buckets.csv")), csv)?;
        tables.push(json!({ "method_id": name, "threshold": threshold, "threshold_source": source, "buckets": table }));
    }
    manifest.write_output(
        out.join("report.json"),
        pretty_json(&json!({ "bucket_reports": tables })),
    )?;
    manifest.finish(out)
}

pub fn sweep(cfg: &RunConfig) -> CmdResult {
    let method = method(cfg)?;
    let out = out_dir(cfg)?;
    let mut manifest = Manifest::new("sweep", cfg);
    let (index, index_sha) = open_index(cfg, &mut manifest)?;
    let split = cfg.split_or(Split::Dev);
    let dataset = dataset_path(cfg)?;
    if is_ambignq(&dataset) {
        return Err(Failure::usage(
            "sweep needs a ClariQ-format dataset with clarity labels",
        ));
    }
    let (queries, dataset_sha) = open_dataset(&dataset, split, true, "dataset", &mut manifest)?;
    let labels: Vec<bool> = binary_labels(&queries)?.into_values().collect();
    let mut queries = queries;
    queries.sort_by(|a, b| a.query_id.cmp(&b.query_id));
    let queries: Vec<_> = queries.iter().map(LabeledQuery::query).collect();

    let scorer = if method.needs_scorer() {
        Some(
            open_scorer(cfg, &mut manifest)?
                .ok_or_else(|| Failure::usage(format!("method {method} needs --scorer")))?,
        )
    } else {
        None
    };
    let cache = open_cache(cfg)?;
    let mut pipeline = Pipeline::new(&index, cfg.pipeline()).with_cache(&cache);
    if let Some(s) = &scorer {
        pipeline = pipeline.with_scorer(s);
    }
    let SweepResult { per_k, selected_k } = pipeline
        .sweep_k(&queries, &labels, method, &cfg.ks())
        .map_err(Failure::pipeline(Stage::Sweep))?;
    report_scorer_use(scorer.as_ref());

    let mut csv = String::from("k,auc\n");
    for (k, auc) in &per_k {
        csv.push_str(&format!("{k},{auc}\n"));
        println!("k={k}\tauc={auc:.4}");
    }
    println!("selected k={selected_k}");
    let mut prov = provenance(cfg, method, &index_sha, &dataset_sha, scorer.as_ref());
    prov["split"] = json!(split);
    prov.as_object_mut().expect("object").remove("k");
    let doc = json!({ "method": method.id(), "per_k": per_k, "selected_k": selected_k, "provenance": prov });
    manifest.write_output(out.join(format!("sweep_{}.csv", method.id())), csv)?;
    manifest.write_output(out.join(format!("sweep_{}.json", method.id())), pretty_json(&doc))?;
    manifest.finish(&out)
}

fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn export_graph(cfg: &RunConfig, query_id: &str) -> CmdResult {
    let out = out_dir(cfg)?;
    let mut manifest = Manifest::new("export-graph", cfg);
    let (index, _) = open_index(cfg, &mut manifest)?;
    let (dataset, _) = open_dataset(
        &dataset_path(cfg)?,
        cfg.split_or(Split::Test),
        false,
        "dataset",
        &mut manifest,
    )?;
    let query = dataset
        .iter()
        .find(|q| q.query_id == query_id)
        .ok_or_else(|| Failure::data(Stage::Dataset)(anyhow::anyhow!("unknown query id `{query_id}`")))?
        .query();
    let scorer = open_scorer(cfg, &mut manifest)?.ok_or_else(|| Failure::usage("export-graph needs --scorer"))?;
    let cache = open_cache(cfg)?;
    let pipeline = Pipeline::new(&index, cfg.pipeline())
        .with_scorer(&scorer)
        .with_cache(&cache);
    let ranked = pipeline.retrieve(&query, cfg.k());
    let network = match pipeline
        .network(&query, &ranked)
        .map_err(Failure::pipeline(Stage::Graph))?
    {
        Some(qn) => qn.network,
        None => {
            let ids = ranked.entries.iter().map(|e| e.passage_id.clone()).collect();
            CoherencyNetwork::from_edges(ids, []).expect("no edges to check")
        }
    };
    report_scorer_use(Some(&scorer));
    let path = out.join(format!("{}.dot", file_safe(query_id)));
    manifest.write_output(path.clone(), export_dot(&network, None))?;
    manifest.finish(&out)?;
    println!(
        "{} nodes, {} edges -> {}",
        network.node_count(),
        network.edge_count(),
        path.display()
    );
    std::io::stdout().flush().ok();
    Ok(())
}
