//! Evaluation: rank correlation, node importance (NI), prediction change (PC),
//! the greedy baseline and the small classifier PC relies on.

mod impact;
mod mlp;
mod report;

pub use impact::{greedy_scores, ni_metric, pc_metric, top_fraction, EmbedFn, GREEDY_LIMIT};
pub use mlp::{mlp_predict, mlp_train, MlpConfig, MlpModel};
pub use report::{markdown_table, EvalReport};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::ScoreVector;
use crate::graph::Graph;
use crate::seed;

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman correlation of two value vectors: Pearson correlation of their
/// average ranks.
pub fn spearman_values(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("score vectors have {} and {} entries", a.len(), b.len())));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 || a.len() < 2 {
        return Err(Error::UndefinedCorrelation("a ranking is constant".into()));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

pub fn spearman(a: &ScoreVector, b: &ScoreVector) -> Result<f64> {
    spearman_values(a.scores(), b.scores())
}

/// Node sets for prediction-change experiments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub test: Vec<usize>,
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub seed: u64,
}

fn test_and_rest(g: &Graph) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = g.num_nodes();
    if n < 10 {
        return Err(Error::invalid(format!("splitting needs at least 10 nodes, got {n}")));
    }
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by(|&a, &b| g.degree(b).total_cmp(&g.degree(a)).then(a.cmp(&b)));
    let t = (0.4 * n as f64).round() as usize;
    let mut test = by_degree[..t].to_vec();
    test.sort_unstable();
    let mut rest = by_degree[t..].to_vec();
    rest.sort_unstable();
    Ok((test, rest))
}

fn side_size(rest: usize) -> usize {
    ((0.1 * rest as f64).round() as usize).max(2).min(rest / 2)
}

/// Test set: the top 40% of nodes by degree (ties by ascending id). Train and
/// valid: `max(2, round(10%))` of the remaining nodes each, sampled with `seed`.
pub fn make_split(g: &Graph, seed: u64) -> Result<Split> {
    let (test, mut rest) = test_and_rest(g)?;
    rest.shuffle(&mut seed::rng(seed));
    let s = side_size(rest.len());
    let mut train = rest[..s].to_vec();
    let mut valid = rest[s..2 * s].to_vec();
    train.sort_unstable();
    valid.sort_unstable();
    Ok(Split { test, train, valid, seed })
}

/// As [`make_split`], but the training set first takes one node of each class
/// present outside the test set (in shuffled order), so a classifier sees
/// every available class.
pub fn make_split_stratified(g: &Graph, labels: &[usize], seed: u64) -> Result<Split> {
    if labels.len() != g.num_nodes() {
        return Err(Error::invalid(format!("{} labels for {} nodes", labels.len(), g.num_nodes())));
    }
    let (test, mut rest) = test_and_rest(g)?;
    rest.shuffle(&mut seed::rng(seed));
    let s = side_size(rest.len());
    let mut train = Vec::with_capacity(s);
    let mut seen = std::collections::HashSet::new();
    for &v in &rest {
        if train.len() < s && seen.insert(labels[v]) {
            train.push(v);
        }
    }
    for &v in &rest {
        if train.len() >= s {
            break;
        }
        if !train.contains(&v) {
            train.push(v);
        }
    }
    let mut valid: Vec<usize> = rest.iter().copied().filter(|v| !train.contains(v)).take(s).collect();
    train.sort_unstable();
    valid.sort_unstable();
    Ok(Split { test, train, valid, seed })
}
