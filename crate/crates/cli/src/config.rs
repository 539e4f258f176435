//! Run configuration: an optional TOML file overlaid with command-line
//! flags, then checked once before any work starts.

use anyhow::{bail, Context};
use clarity_core::eval::Split;
use clarity_core::pipeline::Method;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_K: usize = 20;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_RESAMPLES: usize = 10_000;
pub const DEFAULT_BATCH_SIZE: usize = 64;
pub const DEFAULT_SCORER_TIMEOUT_SECS: u64 = 120;

pub fn default_ks() -> Vec<usize> {
    (1..=10).map(|i| i * 10).collect()
}

/// Every field is optional so that files and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Passage corpus TSV (`pid<TAB>text`)
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,

    /// Index directory written by `clarity index`
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<PathBuf>,

    /// ClariQ TSV, or AmbigNQ JSON when the file ends in `.json`
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,

    /// train, dev or test
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,

    /// nc, anc, wig, nqc, smv or nsigma
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,

    /// heuristic | pair-file:<path> | external:<command>
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scorer: Option<String>,

    /// Retrieval depth [default: 20]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,

    /// Depths for `sweep`, comma separated [default: 10,20,...,100]
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<usize>>,

    /// Edge threshold on successor probabilities [default: 0.5]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,

    /// Cut-off for n(sigma%) as a percentage of the top score [default: 50]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sigma_percent: Option<f64>,

    /// BM25 k1 used when building an index [default: 0.9]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,

    /// BM25 b used when building an index [default: 0.4]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,

    /// Persistent pair-score cache
    #[arg(long, global = true, env = "CLARITY_CACHE_DIR")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,

    /// Bootstrap seed [default: 0]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Bootstrap resamples [default: 10000]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resamples: Option<usize>,

    /// Requests per external scorer batch [default: 64]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,

    /// Seconds an external scorer may take per batch [default: 120]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scorer_timeout_secs: Option<u64>,

    /// Worker threads for per-query work [default: all cores]
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    /// Output directory
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// Reads a TOML file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.corpus,
            &mut cfg.index,
            &mut cfg.dataset,
            &mut cfg.cache_dir,
            &mut cfg.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(spec) = cfg.scorer.as_mut() {
            if let Some(file) = spec.strip_prefix("pair-file:") {
                if Path::new(file).is_relative() {
                    *spec = format!("pair-file:{}", base.join(file).display());
                }
            }
        }
        Ok(cfg)
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(
            base,
            top,
            corpus,
            index,
            dataset,
            split,
            method,
            scorer,
            k,
            ks,
            threshold,
            n_sigma_percent,
            k1,
            b,
            cache_dir,
            seed,
            resamples,
            batch_size,
            scorer_timeout_secs,
            workers,
            out
        )
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(DEFAULT_K)
    }

    pub fn ks(&self) -> Vec<usize> {
        self.ks.clone().unwrap_or_else(default_ks)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(clarity_core::edges::DEFAULT_EDGE_THRESHOLD)
    }

    pub fn n_sigma_percent(&self) -> f64 {
        self.n_sigma_percent
            .unwrap_or(clarity_core::qpp::DEFAULT_N_SIGMA_PERCENT)
    }

    pub fn bm25(&self) -> clarity_core::Bm25Params {
        let d = clarity_core::Bm25Params::default();
        clarity_core::Bm25Params {
            k1: self.k1.unwrap_or(d.k1),
            b: self.b.unwrap_or(d.b),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn resamples(&self) -> usize {
        self.resamples.unwrap_or(DEFAULT_RESAMPLES)
    }

    pub fn split_or(&self, default: Split) -> Split {
        self.split.unwrap_or(default)
    }

    pub fn pipeline(&self) -> clarity_core::pipeline::PipelineConfig {
        clarity_core::pipeline::PipelineConfig {
            k: self.k(),
            edge_threshold: self.threshold(),
            n_sigma_percent: self.n_sigma_percent(),
        }
    }

    /// Copy with every defaulted scalar written out, for manifests.
    pub fn resolved(&self) -> RunConfig {
        let bm25 = self.bm25();
        RunConfig {
            k: Some(self.k()),
            threshold: Some(self.threshold()),
            n_sigma_percent: Some(self.n_sigma_percent()),
            k1: Some(bm25.k1),
            b: Some(bm25.b),
            seed: Some(self.seed()),
            resamples: Some(self.resamples()),
            batch_size: Some(self.batch_size.unwrap_or(DEFAULT_BATCH_SIZE)),
            scorer_timeout_secs: Some(self.scorer_timeout_secs.unwrap_or(DEFAULT_SCORER_TIMEOUT_SECS)),
            ..self.clone()
        }
    }

    /// Range and existence checks shared by every command.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.k() == 0 {
            bail!("k must be at least 1");
        }
        if let Some(ks) = &self.ks {
            if ks.is_empty() || ks.contains(&0) {
                bail!("ks must be a non-empty list of depths >= 1");
            }
        }
        let t = self.threshold();
        if !(0.0..=1.0).contains(&t) {
            bail!("threshold {t} is not in [0, 1]");
        }
        let x = self.n_sigma_percent();
        if !(x > 0.0 && x <= 100.0) {
            bail!("n_sigma_percent {x} is not in (0, 100]");
        }
        let bm25 = self.bm25();
        if !(bm25.k1 >= 0.0 && (0.0..=1.0).contains(&bm25.b)) {
            bail!("BM25 parameters need k1 >= 0 and b in [0, 1]");
        }
        if self.workers == Some(0) || self.batch_size == Some(0) {
            bail!("workers and batch_size must be at least 1");
        }
        for (name, path) in [
            ("corpus", &self.corpus),
            ("index", &self.index),
            ("dataset", &self.dataset),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    bail!("{name} path {} does not exist", p.display());
                }
            }
        }
        if let Some(spec) = &self.scorer {
            match ScorerSpec::parse(spec)? {
                ScorerSpec::PairFile(p) if !p.exists() => bail!("pair file {} does not exist", p.display()),
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    Heuristic,
    PairFile(PathBuf),
    External(Vec<String>),
}

impl ScorerSpec {
    pub fn parse(spec: &str) -> anyhow::Result<Self> {
        if spec == "heuristic" {
            return Ok(ScorerSpec::Heuristic);
        }
        if let Some(path) = spec.strip_prefix("pair-file:") {
            return Ok(ScorerSpec::PairFile(PathBuf::from(path)));
        }
        if let Some(cmd) = spec.strip_prefix("external:") {
            let argv: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if argv.is_empty() {
                bail!("external scorer needs a command");
            }
            return Ok(ScorerSpec::External(argv));
        }
        bail!("unknown scorer `{spec}` (expected heuristic, pair-file:<path> or external:<command>)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "k = 30\nthreshold = 0.7\ndataset = \"data/dev.tsv\"\nmethod = \"nsigma\"\n",
        )
        .unwrap();
        let file = RunConfig::from_file(&path).unwrap();
        assert_eq!(file.dataset, Some(dir.path().join("data/dev.tsv")));
        assert_eq!(file.method, Some(Method::NSigma));
        let merged = file.overlay(RunConfig {
            k: Some(10),
            ..Default::default()
        });
        assert_eq!((merged.k(), merged.threshold()), (10, 0.7));
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_rejected() {
        assert!(toml::from_str::<RunConfig>("depth = 3").is_err());
        assert!(RunConfig {
            k: Some(0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            threshold: Some(1.2),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            dataset: Some("/no/such/file".into()),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn scorer_specs() {
        assert_eq!(ScorerSpec::parse("heuristic").unwrap(), ScorerSpec::Heuristic);
        assert_eq!(
            ScorerSpec::parse("pair-file:x.jsonl").unwrap(),
            ScorerSpec::PairFile("x.jsonl".into())
        );
        assert_eq!(
            ScorerSpec::parse("external:python3 bridge.py --model m").unwrap(),
            ScorerSpec::External(vec!["python3".into(), "bridge.py".into(), "--model".into(), "m".into()])
        );
        assert!(ScorerSpec::parse("bert").is_err());
        assert!(ScorerSpec::parse("external:").is_err());
    }
}
