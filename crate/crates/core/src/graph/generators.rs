//! Small named graphs and random graph models used by tests, suites and benches.

use rand::Rng;

use super::Graph;
use crate::error::Result;
use crate::seed;

const KARATE_EDGES: [(usize, usize); 78] = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11),
    (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13),
    (1, 17), (1, 19), (1, 21), (1, 30), (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27),
    (2, 28), (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
    (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32),
    (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33),
    (23, 25), (23, 27), (23, 29), (23, 32), (23, 33), (24, 25), (24, 27), (24, 31),
    (25, 31), (26, 29), (26, 33), (27, 33), (28, 31), (28, 33), (29, 32), (29, 33),
    (30, 32), (30, 33), (31, 32), (31, 33), (32, 33),
];

/// Faction after the split: 0 for the instructor's side, 1 for the officer's.
const KARATE_FACTIONS: [usize; 34] = [
    0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1,
    1, 1, 1, 1,
];

/// Zachary's karate club with its canonical node ids `0..34`.
pub fn karate() -> Graph {
    let labels = (0..34).map(|i: usize| i.to_string()).collect();
    Graph::from_unweighted(34, KARATE_EDGES)
        .and_then(|g| g.with_labels(labels))
        .expect("static karate edge list is valid")
}

pub fn karate_factions() -> Vec<usize> {
    KARATE_FACTIONS.to_vec()
}

/// Two triangles `{0,1,2}` and `{3,4,5}` joined by the edge `(2, 3)`.
pub fn barbell() -> Graph {
    Graph::from_unweighted(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])
        .expect("static barbell is valid")
}

pub fn complete(n: usize) -> Result<Graph> {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_unweighted(n, edges)
}

pub fn ring(n: usize) -> Result<Graph> {
    Graph::from_unweighted(n, (0..n).map(|u| (u, (u + 1) % n)))
}

/// Node 0 joined to every other node.
pub fn star(n: usize) -> Result<Graph> {
    Graph::from_unweighted(n, (1..n).map(|v| (0, v)))
}

/// `count` disjoint cliques of `size` nodes each; clique `c` holds nodes
/// `c*size .. (c+1)*size`.
pub fn disjoint_cliques(count: usize, size: usize) -> Result<Graph> {
    let edges = (0..count).flat_map(|c| {
        let base = c * size;
        (0..size).flat_map(move |i| (i + 1..size).map(move |j| (base + i, base + j)))
    });
    Graph::from_unweighted(count * size, edges)
}

pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_unweighted(n, edges)
}

/// Uniform random graph with `m` distinct edges and no self-loops.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let mut rng = seed::rng(seed);
    let max = n * n.saturating_sub(1) / 2;
    let m = m.min(max);
    let mut seen = std::collections::HashSet::with_capacity(m);
    while seen.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            seen.insert((u.min(v), u.max(v)));
        }
    }
    let mut edges: Vec<_> = seen.into_iter().collect();
    edges.sort_unstable();
    Graph::from_unweighted(n, edges)
}

/// Stochastic block model. Returns the graph and each node's block.
pub fn sbm(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<(Graph, Vec<usize>)> {
    let blocks: Vec<usize> =
        sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
    let n = blocks.len();
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if blocks[u] == blocks[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok((Graph::from_unweighted(n, edges)?, blocks))
}
