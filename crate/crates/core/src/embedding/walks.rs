use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::graph::Graph;
use crate::par::Execution;
use crate::seed;

const WALK_SALT: u64 = 0x7761_6C6B;

/// Truncated random walks. Walk `r * n + v` is the `r`-th walk rooted at `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<usize>>,
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub seed: u64,
}

impl WalkCorpus {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    /// Occurrences of each node across all walks.
    pub fn counts(&self, num_nodes: usize) -> Vec<u64> {
        let mut c = vec![0u64; num_nodes];
        for w in &self.walks {
            for &v in w {
                c[v] += 1;
            }
        }
        c
    }
}

/// `walks_per_node` walks of up to `walk_length` nodes from every node. Each
/// step picks a neighbour with probability proportional to the edge weight
/// (self-loops included). Every walk draws from its own seeded stream, so the
/// corpus does not depend on thread scheduling.
pub fn generate_walks(g: &Graph, cfg: &TrainConfig) -> WalkCorpus {
    generate_walks_with(g, cfg, Execution::Parallel)
}

pub fn generate_walks_with(g: &Graph, cfg: &TrainConfig, exec: Execution) -> WalkCorpus {
    let n = g.num_nodes();
    let total = n * cfg.walks_per_node;
    let run = seed::derive(cfg.seed, WALK_SALT);
    let walks = exec.map(total, |idx| {
        let mut rng = seed::stream(run, idx as u64);
        walk_from(g, idx % n.max(1), cfg.walk_length, &mut rng)
    });
    WalkCorpus { walks, walk_length: cfg.walk_length, walks_per_node: cfg.walks_per_node, seed: cfg.seed }
}

fn walk_from(g: &Graph, root: usize, len: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut walk = Vec::with_capacity(len);
    walk.push(root);
    let mut cur = root;
    while walk.len() < len {
        let d = g.degree(cur);
        if d <= 0.0 {
            break;
        }
        let (cols, ws) = g.row_slices(cur);
        let mut target = rng.random::<f64>() * d;
        let mut next = *cols.last().expect("positive degree implies a neighbour");
        for (&c, &w) in cols.iter().zip(ws) {
            if target < w {
                next = c;
                break;
            }
            target -= w;
        }
        walk.push(next);
        cur = next;
    }
    walk
}
