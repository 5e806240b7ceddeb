use ndarray::{Array2, ArrayView2};

use super::ScoreVector;
use crate::clusters::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Total weight of `v`'s edges into clusters other than its own.
pub fn bridgeness(g: &Graph, clusters: &ClusterAssignment, v: usize) -> f64 {
    let home = clusters.cluster_of(v);
    g.row(v).filter(|&(u, _)| u != v && clusters.cluster_of(u) != home).map(|(_, w)| w).sum()
}

pub fn bridgeness_scores(g: &Graph, clusters: &ClusterAssignment) -> Result<ScoreVector> {
    if clusters.len() != g.num_nodes() {
        return Err(Error::invalid(format!(
            "cluster assignment covers {} nodes, graph has {}",
            clusters.len(),
            g.num_nodes()
        )));
    }
    let s = (0..g.num_nodes()).map(|v| bridgeness(g, clusters, v)).collect();
    Ok(ScoreVector::new("bridgeness", s))
}

/// `max(1, round(0.05 |V|))`, the default neighbourhood size for [`imp`].
pub fn default_m(n: usize) -> usize {
    ((0.05 * n as f64).round() as usize).max(1)
}

fn sq_dist(p: ArrayView2<'_, f64>, i: usize, j: usize) -> f64 {
    p.row(i).iter().zip(p.row(j)).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// The `m` nearest rows to row `i` (itself excluded) by Euclidean distance,
/// ties broken by ascending index.
pub fn nearest_neighbors(points: ArrayView2<'_, f64>, i: usize, m: usize) -> Vec<usize> {
    let mut others: Vec<(f64, usize)> =
        (0..points.nrows()).filter(|&j| j != i).map(|j| (sq_dist(points, i, j), j)).collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    others.into_iter().take(m).map(|(_, j)| j).collect()
}

/// Mean fraction of each node's `m` nearest latent neighbours that differ
/// between `w` and `w_pert`.
pub fn imp(w: ArrayView2<'_, f64>, w_pert: ArrayView2<'_, f64>, m: usize) -> Result<f64> {
    if w.dim() != w_pert.dim() {
        return Err(Error::invalid(format!("embedding shapes {:?} and {:?} differ", w.dim(), w_pert.dim())));
    }
    let n = w.nrows();
    if m == 0 || m >= n {
        return Err(Error::invalid(format!("m must satisfy 1 <= m < |V| = {n}, got {m}")));
    }
    let mut total = 0.0;
    for i in 0..n {
        let a = nearest_neighbors(w, i, m);
        let b = nearest_neighbors(w_pert, i, m);
        let shared = a.iter().filter(|x| b.contains(x)).count();
        total += 1.0 - shared as f64 / m as f64;
    }
    Ok(total / n as f64)
}

/// `sum_{i,j} |x_i - x_j|^2` over ordered pairs, computed as `2 n sum |x_i - mean|^2`.
pub fn pairwise_spread(points: ArrayView2<'_, f64>) -> f64 {
    let n = points.nrows();
    if n == 0 {
        return 0.0;
    }
    let mean = points.mean_axis(ndarray::Axis(0)).expect("non-empty");
    let centred: f64 =
        points.outer_iter().map(|r| r.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sum();
    2.0 * n as f64 * centred
}

fn scaled_rows(points: ArrayView2<'_, f64>, scale: impl Fn(usize) -> f64) -> Array2<f64> {
    let mut out = points.to_owned();
    for (i, mut row) in out.outer_iter_mut().enumerate() {
        let s = scale(i);
        row.mapv_inplace(|x| x / s);
    }
    out
}

fn check_perturbed_pair(g: &Graph, w: ArrayView2<'_, f64>, g_pert: &Graph, w_pert: ArrayView2<'_, f64>) -> Result<()> {
    if w.dim() != w_pert.dim() || w.nrows() != g.num_nodes() || g.num_nodes() != g_pert.num_nodes() {
        return Err(Error::invalid("graphs and embeddings must share one node set and dimension"));
    }
    for (v, (a, b)) in g.degrees().iter().zip(g_pert.degrees()).enumerate() {
        if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
            return Err(Error::invalid(format!("degree of node {v} differs: {a} vs {b}")));
        }
    }
    let iso = g.isolated_nodes();
    if !iso.is_empty() {
        return Err(Error::invalid(format!("zero-degree nodes: {iso:?}")));
    }
    Ok(())
}

/// Change in the degree-normalized sum of pairwise distances,
/// `|sum_{i,j} |w_i/sqrt(d_i) - w_j/sqrt(d_j)|^2 - (same for W')|`, summed over
/// all ordered pairs. The perturbed graph must have the same degrees.
pub fn imp_hat(g: &Graph, w: ArrayView2<'_, f64>, g_pert: &Graph, w_pert: ArrayView2<'_, f64>) -> Result<f64> {
    check_perturbed_pair(g, w, g_pert, w_pert)?;
    let d = g.degrees();
    let x = scaled_rows(w, |i| d[i].sqrt());
    let xp = scaled_rows(w_pert, |i| d[i].sqrt());
    Ok((pairwise_spread(x.view()) - pairwise_spread(xp.view())).abs())
}

/// Edge-weighted form of [`imp_hat`]:
/// `|sum_{i,j} A_ij |x_i - x_j|^2 - sum_{i,j} A'_ij |x'_i - x'_j|^2|` with
/// `x_i = w_i / sqrt(d_i)`. For spectral embeddings this is exactly twice the
/// change in the relaxed normalized association.
pub fn imp_hat_edge_weighted(
    g: &Graph,
    w: ArrayView2<'_, f64>,
    g_pert: &Graph,
    w_pert: ArrayView2<'_, f64>,
) -> Result<f64> {
    check_perturbed_pair(g, w, g_pert, w_pert)?;
    let d = g.degrees();
    let weighted = |graph: &Graph, p: ArrayView2<'_, f64>| -> f64 {
        let x = scaled_rows(p, |i| d[i].sqrt());
        (0..graph.num_nodes())
            .flat_map(|u| graph.row(u).map(move |(v, a)| (u, v, a)))
            .map(|(u, v, a)| a * sq_dist(x.view(), u, v))
            .sum()
    };
    Ok((weighted(g, w) - weighted(g_pert, w_pert)).abs())
}

fn cut(points: ArrayView2<'_, f64>, clusters: &ClusterAssignment) -> Result<f64> {
    if clusters.len() != points.nrows() {
        return Err(Error::invalid(format!(
            "{} cluster labels for {} points",
            clusters.len(),
            points.nrows()
        )));
    }
    let mut within = 0.0;
    for c in 0..clusters.k() {
        let members = clusters.members(c);
        within += pairwise_spread(points.select(ndarray::Axis(0), &members).view());
    }
    Ok((pairwise_spread(points) - within).max(0.0))
}

/// Euclidean cut: `sum_m sum_{i in C_m, j not in C_m} |x_i - x_j|^2`.
pub fn euclidean_cut(points: ArrayView2<'_, f64>, clusters: &ClusterAssignment) -> Result<f64> {
    cut(points, clusters)
}

/// Degree-normalized Euclidean cut: the cut of rows `x_i / d_i`.
pub fn dnec(points: ArrayView2<'_, f64>, clusters: &ClusterAssignment, degrees: &[f64]) -> Result<f64> {
    if degrees.len() != points.nrows() {
        return Err(Error::invalid("one degree per point required"));
    }
    if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::invalid(format!("node {v} has non-positive degree")));
    }
    cut(scaled_rows(points, |i| degrees[i]).view(), clusters)
}
