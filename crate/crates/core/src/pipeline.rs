//! Per-query scoring: retrieve, then either build and measure the
//! coherency network or evaluate a QPP formula.

use crate::corpus::{CorpusError, Index, Passage, Query, RankedList};
use crate::edges::{binarize_edges, score_pairs, EdgeError, PairCache, PairScoreSet, SuccessorScorer};
use crate::eval::{auc, EvalError, MAX_AMBIGUITY};
use crate::graph::{build_network, connectivity_report, CoherencyNetwork, ConnectivityReport, GraphError};
use crate::qpp::{Predictor, QppError, QppInput};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Nc,
    Anc,
    Wig,
    Nqc,
    Smv,
    NSigma,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Nc,
        Method::Anc,
        Method::Wig,
        Method::Nqc,
        Method::Smv,
        Method::NSigma,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::Nc => "nc",
            Method::Anc => "anc",
            Method::Wig => "wig",
            Method::Nqc => "nqc",
            Method::Smv => "smv",
            Method::NSigma => "nsigma",
        }
    }

    pub fn needs_scorer(self) -> bool {
        matches!(self, Method::Nc | Method::Anc)
    }

    fn predictor(self) -> Option<Predictor> {
        match self {
            Method::Wig => Some(Predictor::Wig),
            Method::Nqc => Some(Predictor::Nqc),
            Method::Smv => Some(Predictor::Smv),
            Method::NSigma => Some(Predictor::NSigma),
            Method::Nc | Method::Anc => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown method `{s}` (expected nc, anc, wig, nqc, smv or nsigma)"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("method `{0}` needs a successor scorer")]
    MissingScorer(Method),
    #[error("query `{query_id}`: {source}")]
    Edge {
        query_id: String,
        #[source]
        source: EdgeError,
    },
    #[error("query `{query_id}`: {source}")]
    Graph {
        query_id: String,
        #[source]
        source: GraphError,
    },
    #[error("query `{query_id}`: {source}")]
    Qpp {
        query_id: String,
        #[source]
        source: QppError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no depths to sweep")]
    EmptySweep,
}

impl PipelineError {
    /// True when the failure came from the successor scorer (subprocess,
    /// pair file, protocol) rather than from the data.
    pub fn is_scorer_failure(&self) -> bool {
        matches!(
            self,
            PipelineError::Edge {
                source: EdgeError::Scorer { .. },
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub edge_threshold: f64,
    pub n_sigma_percent: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: 20,
            edge_threshold: crate::edges::DEFAULT_EDGE_THRESHOLD,
            n_sigma_percent: crate::qpp::DEFAULT_N_SIGMA_PERCENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryScore {
    pub query_id: String,
    /// Method output in its natural direction (connectivity or predicted
    /// performance); `None` when the retrieval was too small to score.
    pub raw: Option<f64>,
    /// `-raw`, or [`MAX_AMBIGUITY`] for unscoreable queries.
    pub ambiguity: f64,
    pub retrieved: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connectivity: Option<ConnectivityReport>,
}

/// Coherency network of one query with the pair scores it came from.
#[derive(Debug, Clone)]
pub struct QueryNetwork {
    pub ranked: RankedList,
    pub scores: PairScoreSet,
    pub network: CoherencyNetwork,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub per_k: BTreeMap<usize, f64>,
    pub selected_k: usize,
}

pub struct Pipeline<'a> {
    index: &'a Index,
    scorer: Option<&'a dyn SuccessorScorer>,
    cache: Option<&'a PairCache>,
    config: PipelineConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(index: &'a Index, config: PipelineConfig) -> Self {
        Pipeline {
            index,
            scorer: None,
            cache: None,
            config,
        }
    }

    pub fn with_scorer(mut self, scorer: &'a dyn SuccessorScorer) -> Self {
        self.scorer = Some(scorer);
        self
    }

    pub fn with_cache(mut self, cache: &'a PairCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn retrieve(&self, query: &Query, k: usize) -> RankedList {
        self.index.retrieve_top_k(query, k)
    }

    fn passages(&self, ranked: &RankedList) -> Result<Vec<Passage>, CorpusError> {
        ranked
            .entries
            .iter()
            .map(|e| {
                self.index
                    .passage(&e.passage_id)
                    .ok_or_else(|| CorpusError::UnknownPassage(e.passage_id.clone()))
            })
            .collect()
    }

    /// Coherency network over `ranked`, or `None` when it holds fewer than
    /// two passages.
    pub fn network(&self, query: &Query, ranked: &RankedList) -> Result<Option<QueryNetwork>, PipelineError> {
        let scorer = self.scorer.ok_or(PipelineError::MissingScorer(Method::Anc))?;
        if ranked.len() < 2 {
            return Ok(None);
        }
        let passages = self.passages(ranked)?;
        let edge_err = |source| PipelineError::Edge {
            query_id: query.id.clone(),
            source,
        };
        let scores = score_pairs(&query.id, &passages, scorer, self.cache).map_err(edge_err)?;
        let edges = binarize_edges(&scores, self.config.edge_threshold).map_err(edge_err)?;
        let network = build_network(&edges);
        Ok(Some(QueryNetwork {
            ranked: ranked.clone(),
            scores,
            network,
        }))
    }

    /// Scores `query` on an already retrieved list.
    pub fn score_ranked(
        &self,
        query: &Query,
        ranked: &RankedList,
        method: Method,
    ) -> Result<QueryScore, PipelineError> {
        let unscoreable = || QueryScore {
            query_id: query.id.clone(),
            raw: None,
            ambiguity: MAX_AMBIGUITY,
            retrieved: ranked.len(),
            connectivity: None,
        };
        if let Some(predictor) = method.predictor() {
            if ranked.is_empty() {
                log::info!("query `{}` retrieved nothing; scored as most ambiguous", query.id);
                return Ok(unscoreable());
            }
            let qpp_err = |source| PipelineError::Qpp {
                query_id: query.id.clone(),
                source,
            };
            let input = QppInput::from_retrieval(self.index, query, ranked).map_err(qpp_err)?;
            let raw = predictor
                .evaluate(&input, self.config.n_sigma_percent)
                .map_err(qpp_err)?;
            return Ok(QueryScore {
                query_id: query.id.clone(),
                raw: Some(raw),
                ambiguity: -raw,
                retrieved: ranked.len(),
                connectivity: None,
            });
        }

        if self.scorer.is_none() {
            return Err(PipelineError::MissingScorer(method));
        }
        let Some(qn) = self.network(query, ranked)? else {
            log::info!(
                "query `{}` retrieved {} passage(s); scored as most ambiguous",
                query.id,
                ranked.len()
            );
            return Ok(unscoreable());
        };
        let report = connectivity_report(&qn.network, &query.id, false).map_err(|source| PipelineError::Graph {
            query_id: query.id.clone(),
            source,
        })?;
        let raw = match method {
            Method::Nc => report.nc as f64,
            _ => report.anc,
        };
        Ok(QueryScore {
            query_id: query.id.clone(),
            raw: Some(raw),
            ambiguity: -raw,
            retrieved: ranked.len(),
            connectivity: Some(report),
        })
    }

    pub fn score_query(&self, query: &Query, method: Method) -> Result<QueryScore, PipelineError> {
        let ranked = self.retrieve(query, self.config.k);
        self.score_ranked(query, &ranked, method)
    }

    /// Scores every query in parallel on the current rayon pool; the output
    /// keeps input order.
    pub fn run(&self, queries: &[Query], method: Method) -> Result<Vec<QueryScore>, PipelineError> {
        if method.needs_scorer() && self.scorer.is_none() {
            return Err(PipelineError::MissingScorer(method));
        }
        queries.par_iter().map(|q| self.score_query(q, method)).collect()
    }

    /// Dev-set AUC of `method` at each depth in `depths`. Retrieval runs
    /// once at the largest depth and shallower lists are its prefixes. The
    /// selected depth maximises AUC, preferring the smaller depth on ties.
    pub fn sweep_k(
        &self,
        queries: &[Query],
        labels: &[bool],
        method: Method,
        depths: &[usize],
    ) -> Result<SweepResult, PipelineError> {
        let deepest = *depths.iter().max().ok_or(PipelineError::EmptySweep)?;
        let retrieved: Vec<RankedList> = queries.par_iter().map(|q| self.retrieve(q, deepest)).collect();
        let mut per_k = BTreeMap::new();
        for &k in depths.iter().collect::<std::collections::BTreeSet<_>>() {
            let scores: Vec<f64> = queries
                .par_iter()
                .zip(&retrieved)
                .map(|(q, r)| self.score_ranked(q, &r.truncated(k), method).map(|s| s.ambiguity))
                .collect::<Result<_, _>>()?;
            per_k.insert(k, auc(&scores, labels)?);
        }
        let mut selected = (deepest, f64::NEG_INFINITY);
        for (&k, &a) in &per_k {
            if a > selected.1 {
                selected = (k, a);
            }
        }
        Ok(SweepResult {
            per_k,
            selected_k: selected.0,
        })
    }
}
