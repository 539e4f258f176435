//! Exhaustive connectivity oracles for small digraphs (n <= 8).
//!
//! Graphs are plain adjacency matrices: `adj[i][j]` is the edge i -> j.

use rand::Rng;

pub type Adjacency = Vec<Vec<bool>>;

pub fn empty(n: usize) -> Adjacency {
    vec![vec![false; n]; n]
}

pub fn complete(n: usize) -> Adjacency {
    (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect()
}

pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, density: f64) -> Adjacency {
    (0..n)
        .map(|i| (0..n).map(|j| i != j && rng.random_bool(density)).collect())
        .collect()
}

fn simple_paths(adj: &Adjacency, u: usize, v: usize) -> Vec<u32> {
    // Each path is recorded by the bitmask of its internal vertices.
    fn walk(adj: &Adjacency, at: usize, v: usize, visited: u32, internal: u32, out: &mut Vec<u32>) {
        for next in 0..adj.len() {
            if !adj[at][next] || visited & (1 << next) != 0 {
                continue;
            }
            if next == v {
                out.push(internal);
            } else {
                walk(adj, next, v, visited | (1 << next), internal | (1 << next), out);
            }
        }
    }
    let mut out = Vec::new();
    walk(adj, u, v, 1 << u, 0, &mut out);
    out
}

/// Maximum number of internally vertex-disjoint u -> v paths, found by
/// enumerating every simple path and searching all packings.
pub fn local_connectivity_packing(adj: &Adjacency, u: usize, v: usize) -> usize {
    let paths = simple_paths(adj, u, v);
    let mut memo = std::collections::HashMap::new();
    fn best(paths: &[u32], i: usize, used: u32, memo: &mut std::collections::HashMap<(usize, u32), usize>) -> usize {
        if i == paths.len() {
            return 0;
        }
        if let Some(&hit) = memo.get(&(i, used)) {
            return hit;
        }
        let mut value = best(paths, i + 1, used, memo);
        if paths[i] & used == 0 {
            value = value.max(1 + best(paths, i + 1, used | paths[i], memo));
        }
        memo.insert((i, used), value);
        value
    }
    best(&paths, 0, 0, &mut memo)
}

fn reaches(adj: &Adjacency, u: usize, v: usize, removed: u32) -> bool {
    let mut seen = removed | (1 << u);
    let mut stack = vec![u];
    while let Some(at) = stack.pop() {
        if at == v {
            return true;
        }
        for (next, &edge) in adj[at].iter().enumerate() {
            if edge && seen & (1 << next) == 0 {
                seen |= 1 << next;
                stack.push(next);
            }
        }
    }
    false
}

/// Menger route: smallest vertex set separating u from v, with an
/// existing u -> v edge counted as one extra unbreakable path.
pub fn local_connectivity_cut(adj: &Adjacency, u: usize, v: usize) -> usize {
    if adj[u][v] {
        let mut without = adj.clone();
        without[u][v] = false;
        return 1 + local_connectivity_cut(&without, u, v);
    }
    let n = adj.len();
    let mut best = usize::MAX;
    for removed in 0u32..(1 << n) {
        if removed & ((1 << u) | (1 << v)) != 0 {
            continue;
        }
        let size = removed.count_ones() as usize;
        if size < best && !reaches(adj, u, v, removed) {
            best = size;
        }
    }
    best
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
}

pub fn node_connectivity(adj: &Adjacency) -> usize {
    ordered_pairs(adj.len())
        .map(|(u, v)| local_connectivity_packing(adj, u, v))
        .min()
        .expect("at least two nodes")
}

pub fn average_node_connectivity(adj: &Adjacency) -> f64 {
    let n = adj.len();
    let total: usize = ordered_pairs(n)
        .map(|(u, v)| local_connectivity_packing(adj, u, v))
        .sum();
    total as f64 / (n * (n - 1)) as f64
}

/// Textbook vertex connectivity: fewest vertices whose removal leaves a
/// digraph that is not strongly connected or has a single vertex.
pub fn classical_vertex_connectivity(adj: &Adjacency) -> usize {
    let n = adj.len();
    let mut best = n - 1;
    for removed in 0u32..(1 << n) {
        let size = removed.count_ones() as usize;
        if size >= best {
            continue;
        }
        let alive: Vec<usize> = (0..n).filter(|&i| removed & (1 << i) == 0).collect();
        let strongly = alive
            .iter()
            .all(|&a| alive.iter().all(|&b| a == b || reaches(adj, a, b, removed)));
        if !strongly {
            best = size;
        }
    }
    best
}
