use ndarray::Array2;

use super::{mlp_predict, mlp_train, MlpConfig, Split};
use crate::clusters::ClusterAssignment;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::explain::{imp, ScoreVector};
use crate::graph::{perturb, perturb_sequence, Graph};
use crate::par::Execution;
use crate::seed;

/// Retrains an embedding of a graph for a given seed.
pub type EmbedFn<'a> = dyn Fn(&Graph, u64) -> Result<EmbeddingMatrix> + Sync + 'a;

/// Largest graph the greedy baseline (one retraining per node) accepts.
pub const GREEDY_LIMIT: usize = 500;

/// The top `max(1, round(z% of |V|))` nodes of a ranking.
pub fn top_fraction(scores: &ScoreVector, z_percent: f64) -> Result<Vec<usize>> {
    if !(z_percent > 0.0 && z_percent <= 100.0) {
        return Err(Error::invalid(format!("z must be in (0, 100], got {z_percent}")));
    }
    let count = ((z_percent / 100.0 * scores.len() as f64).round() as usize).max(1);
    Ok(scores.top_q(count))
}

/// Node importance: perturb the top `z%` nodes of `method` one after another
/// (ascending id, against the fixed `clusters`), retrain with the same seed,
/// and measure [`imp`] between the two embeddings. Averaged over `seeds`.
#[allow(clippy::too_many_arguments)]
pub fn ni_metric(
    g: &Graph,
    method: &ScoreVector,
    z_percent: f64,
    embed_fn: &EmbedFn<'_>,
    clusters: &ClusterAssignment,
    alpha: f64,
    m: usize,
    seeds: &[u64],
) -> Result<f64> {
    if seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let top = top_fraction(method, z_percent)?;
    let mut total = 0.0;
    for &s in seeds {
        let w = embed_fn(g, s)?;
        let (gp, _) = perturb_sequence(g, &top, alpha, clusters, s)?;
        let wp = embed_fn(&gp, s)?;
        total += imp(w.target().view(), wp.target().view(), m)?;
    }
    Ok(total / seeds.len() as f64)
}

fn class_count(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

fn rows(w: &EmbeddingMatrix, nodes: &[usize]) -> Array2<f64> {
    w.target().select(ndarray::Axis(0), nodes)
}

fn l1_change(p: &Array2<f64>, q: &Array2<f64>) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

fn trained(w: &EmbeddingMatrix, labels: &[usize], split: &Split, cfg: MlpConfig) -> Result<super::MlpModel> {
    let y: Vec<usize> = split.train.iter().map(|&v| labels[v]).collect();
    let mut distinct = y.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid(format!(
            "training split has {} class(es); prediction change needs at least two",
            distinct.len()
        )));
    }
    mlp_train(rows(w, &split.train).view(), &y, class_count(labels), &cfg)
}

/// Prediction change: train the classifier once on the original embedding,
/// then compare its test-set probabilities on the original and on the
/// retrained embedding of the perturbed graph. Mean L1 change per test node,
/// averaged over `seeds`.
#[allow(clippy::too_many_arguments)]
pub fn pc_metric(
    g: &Graph,
    labels: &[usize],
    split: &Split,
    method: &ScoreVector,
    z_percent: f64,
    embed_fn: &EmbedFn<'_>,
    clusters: &ClusterAssignment,
    alpha: f64,
    seeds: &[u64],
    mlp: &MlpConfig,
) -> Result<f64> {
    if labels.len() != g.num_nodes() {
        return Err(Error::invalid(format!("{} labels for {} nodes", labels.len(), g.num_nodes())));
    }
    if seeds.is_empty() || split.test.is_empty() {
        return Err(Error::invalid("need at least one seed and one test node"));
    }
    let top = top_fraction(method, z_percent)?;
    let mut total = 0.0;
    for &s in seeds {
        let w = embed_fn(g, s)?;
        let model = trained(&w, labels, split, MlpConfig { seed: s, ..*mlp })?;
        let before = mlp_predict(&model, rows(&w, &split.test).view());
        let (gp, _) = perturb_sequence(g, &top, alpha, clusters, s)?;
        let wp = embed_fn(&gp, s)?;
        let after = mlp_predict(&model, rows(&wp, &split.test).view());
        total += l1_change(&before, &after) / split.test.len() as f64;
    }
    Ok(total / seeds.len() as f64)
}

/// Greedy baseline: the prediction change on the test set caused by
/// perturbing each node alone. Nodes without inter-cluster edges are left
/// untouched by the perturbation and score 0 without retraining.
#[allow(clippy::too_many_arguments)]
pub fn greedy_scores(
    g: &Graph,
    labels: &[usize],
    split: &Split,
    embed_fn: &EmbedFn<'_>,
    clusters: &ClusterAssignment,
    alpha: f64,
    seed: u64,
    mlp: &MlpConfig,
    exec: Execution,
) -> Result<ScoreVector> {
    let n = g.num_nodes();
    if n > GREEDY_LIMIT {
        return Err(Error::Capacity { what: "greedy baseline", size: n, limit: GREEDY_LIMIT });
    }
    if labels.len() != n {
        return Err(Error::invalid(format!("{} labels for {n} nodes", labels.len())));
    }
    let w = embed_fn(g, seed)?;
    let model = trained(&w, labels, split, MlpConfig { seed, ..*mlp })?;
    let before = mlp_predict(&model, rows(&w, &split.test).view());
    let scores = exec.try_map(n, |v| -> Result<f64> {
        let (gp, rec) = perturb(g, v, alpha, clusters, seed::derive(seed, v as u64))?;
        if rec.is_empty() {
            return Ok(0.0);
        }
        let wp = embed_fn(&gp, seed)?;
        Ok(l1_change(&before, &mlp_predict(&model, rows(&wp, &split.test).view())))
    })?;
    Ok(ScoreVector::new("greedy", scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::karate;

    fn fixed(g: &Graph, _seed: u64) -> Result<EmbeddingMatrix> {
        let n = g.num_nodes();
        Ok(EmbeddingMatrix::from_target(Array2::from_shape_fn((n, 2), |(i, j)| ((i * 7 + j * 3) % 11) as f64)))
    }

    #[test]
    fn fixed_embedding_has_zero_impact() {
        let g = karate();
        let f = crate::graph::karate_factions();
        let c = ClusterAssignment::from_labels(f.clone(), 2).unwrap();
        let s = crate::explain::degree_scores(&g);
        assert_eq!(ni_metric(&g, &s, 10.0, &fixed, &c, 0.5, 2, &[1, 2]).unwrap(), 0.0);
        let split = super::super::make_split_stratified(&g, &f, 3).unwrap();
        let mlp = MlpConfig::default();
        assert_eq!(pc_metric(&g, &f, &split, &s, 10.0, &fixed, &c, 0.5, &[1], &mlp).unwrap(), 0.0);
        let greedy = greedy_scores(&g, &f, &split, &fixed, &c, 0.5, 1, &mlp, Execution::default()).unwrap();
        assert!(greedy.scores().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn z_bounds() {
        let s = ScoreVector::new("x", vec![1.0; 34]);
        assert!(top_fraction(&s, 0.0).is_err());
        assert!(top_fraction(&s, 100.5).is_err());
        assert_eq!(top_fraction(&s, 3.0).unwrap().len(), 1);
        assert_eq!(top_fraction(&s, 10.0).unwrap().len(), 3);
        assert_eq!(top_fraction(&s, 100.0).unwrap().len(), 34);
    }

    #[test]
    fn greedy_size_guard() {
        let g = Graph::from_unweighted(GREEDY_LIMIT + 1, []).unwrap();
        let labels = vec![0; GREEDY_LIMIT + 1];
        let c = ClusterAssignment::from_labels(vec![0; GREEDY_LIMIT + 1], 1).unwrap();
        let split = Split { test: vec![0], train: vec![1], valid: vec![], seed: 0 };
        let r = greedy_scores(&g, &labels, &split, &fixed, &c, 0.5, 0, &MlpConfig::default(), Execution::Sequential);
        assert!(matches!(r, Err(Error::Capacity { .. })));
    }
}
