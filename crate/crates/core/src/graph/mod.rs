//! Coherency networks and their connectivity.
//!
//! Nodes are retrieved passages; an edge `i -> j` means passage `j` was
//! predicted to follow passage `i`. The network is directed throughout, so
//! a network that is not strongly connected has node connectivity 0.

mod dot;
mod flow;

use crate::edges::EdgeMatrix;
use flow::SplitNetwork;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dot::export_dot;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("connectivity needs at least 2 nodes, graph has {0}")]
    TooFewNodes(usize),
    #[error("source and target are the same node ({0})")]
    SameNode(usize),
    #[error("node {node} is out of range for a graph with {n} nodes")]
    UnknownNode { node: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherencyNetwork {
    nodes: Vec<String>,
    /// Sorted out-neighbours of each node.
    out: Vec<Vec<usize>>,
}

impl CoherencyNetwork {
    /// Builds a network from `(source, target)` index pairs. Self-loops and
    /// duplicates are dropped; out-of-range indices are rejected.
    pub fn from_edges<I>(nodes: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        for (a, b) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(GraphError::UnknownNode { node, n });
                }
            }
            if a != b {
                out[a].push(b);
            }
        }
        for list in out.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(CoherencyNetwork { nodes, out })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.out.get(a).is_some_and(|l| l.binary_search(&b).is_ok())
    }

    /// Edges in `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
    }

    fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for (_, b) in self.edges() {
            deg[b] += 1;
        }
        deg
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.node_count();
        for node in [u, v] {
            if node >= n {
                return Err(GraphError::UnknownNode { node, n });
            }
        }
        if u == v {
            return Err(GraphError::SameNode(u));
        }
        Ok(())
    }

    fn check_scoreable(&self) -> Result<(), GraphError> {
        match self.node_count() {
            n if n < 2 => Err(GraphError::TooFewNodes(n)),
            _ => Ok(()),
        }
    }

    /// Row `u`, column `v`: local connectivity from `u` to `v` (0 on the
    /// diagonal). Rows are computed in parallel.
    pub fn local_connectivity_matrix(&self) -> Vec<Vec<usize>> {
        let in_deg = self.in_degrees();
        let base = SplitNetwork::new(&self.out);
        (0..self.node_count())
            .into_par_iter()
            .map_init(
                || base.clone(),
                |net, u| {
                    (0..self.node_count())
                        .map(|v| {
                            let limit = self.out[u].len().min(in_deg[v]);
                            if u == v || limit == 0 {
                                0
                            } else {
                                net.disjoint_paths(u, v, limit)
                            }
                        })
                        .collect()
                },
            )
            .collect()
    }
}

/// Graph of the true cells of `edges`, in the same node order.
pub fn build_network(edges: &EdgeMatrix) -> CoherencyNetwork {
    let pairs = edges.adj.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(move |&(j, &e)| e && i != j)
            .map(move |(j, _)| (i, j))
    });
    CoherencyNetwork::from_edges(edges.passages.clone(), pairs).expect("adjacency is square")
}

/// Maximum number of internally node-disjoint directed paths from `u` to
/// `v`. For non-adjacent nodes this is the size of a minimum `u`-`v`
/// vertex cut.
pub fn local_node_connectivity(g: &CoherencyNetwork, u: usize, v: usize) -> Result<usize, GraphError> {
    g.check_pair(u, v)?;
    let limit = g.out[u].len().min(g.in_degrees()[v]);
    if limit == 0 {
        return Ok(0);
    }
    Ok(SplitNetwork::new(&g.out).disjoint_paths(u, v, limit))
}

/// Minimum local connectivity over all ordered pairs.
pub fn node_connectivity(g: &CoherencyNetwork) -> Result<usize, GraphError> {
    g.check_scoreable()?;
    Ok(min_off_diagonal(&g.local_connectivity_matrix()))
}

/// Mean local connectivity over the `n(n-1)` ordered pairs.
pub fn average_node_connectivity(g: &CoherencyNetwork) -> Result<f64, GraphError> {
    g.check_scoreable()?;
    Ok(mean_off_diagonal(&g.local_connectivity_matrix()))
}

fn min_off_diagonal(m: &[Vec<usize>]) -> usize {
    m.iter()
        .enumerate()
        .flat_map(|(u, row)| row.iter().enumerate().filter(move |&(v, _)| v != u).map(|(_, &k)| k))
        .min()
        .unwrap_or(0)
}

fn mean_off_diagonal(m: &[Vec<usize>]) -> f64 {
    let n = m.len();
    let total: usize = m.iter().flatten().sum();
    total as f64 / (n * (n - 1)) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConnectivity {
    pub source: usize,
    pub target: usize,
    pub connectivity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub query_id: String,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub nc: usize,
    pub anc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_pair: Option<Vec<PairConnectivity>>,
}

/// NC and ANC from a single all-pairs pass.
pub fn connectivity_report(
    g: &CoherencyNetwork,
    query_id: &str,
    keep_pairs: bool,
) -> Result<ConnectivityReport, GraphError> {
    g.check_scoreable()?;
    let m = g.local_connectivity_matrix();
    let per_pair = keep_pairs.then(|| {
        m.iter()
            .enumerate()
            .flat_map(|(u, row)| {
                row.iter()
                    .enumerate()
                    .filter(move |&(v, _)| v != u)
                    .map(move |(v, &k)| PairConnectivity {
                        source: u,
                        target: v,
                        connectivity: k,
                    })
            })
            .collect()
    });
    Ok(ConnectivityReport {
        query_id: query_id.to_string(),
        n_nodes: g.node_count(),
        n_edges: g.edge_count(),
        nc: min_off_diagonal(&m),
        anc: mean_off_diagonal(&m),
        per_pair,
    })
}
