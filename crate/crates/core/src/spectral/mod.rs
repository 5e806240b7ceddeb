//! Spectral machinery: the normalized adjacency, its top eigenvectors,
//! k-means, spectral clustering, normalized association and NetMF.

mod kmeans;
mod netmf;

pub use kmeans::{kmeans, kmeans_with, KMeansOptions};
pub use netmf::{netmf_matrix, svd_embedding};

pub use crate::linalg::EigenDecomposition;

use ndarray::{Array2, ArrayView2};

use crate::clusters::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::{Graph, DENSE_LIMIT};
use crate::linalg::lanczos;

/// `D^{-1/2} A D^{-1/2}` as a dense matrix.
pub fn normalized_adjacency(g: &Graph) -> Result<Array2<f64>> {
    let n = g.num_nodes();
    if n > DENSE_LIMIT {
        return Err(Error::Capacity { what: "normalized adjacency", size: n, limit: DENSE_LIMIT });
    }
    let iso = g.isolated_nodes();
    if !iso.is_empty() {
        return Err(Error::invalid(format!("zero-degree nodes: {iso:?}")));
    }
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut m = Array2::<f64>::zeros((n, n));
    for u in 0..n {
        for (v, w) in g.row(u) {
            m[[u, v]] = inv_sqrt[u] * w * inv_sqrt[v];
        }
    }
    Ok(m)
}

/// Top-`k` eigenpairs by Lanczos with full reorthogonalization.
pub fn top_k_eigen(m: ArrayView2<'_, f64>, k: usize) -> Result<EigenDecomposition> {
    lanczos::top_k(m, k)
}

/// Spectral embedding `U`: the top-`k` eigenvectors of the normalized adjacency.
pub fn spectral_embedding(g: &Graph, k: usize) -> Result<EigenDecomposition> {
    let a = normalized_adjacency(g)?;
    top_k_eigen(a.view(), k)
}

/// Rows scaled to unit length; zero rows stay zero.
pub fn row_normalize(points: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = points.to_owned();
    for mut row in out.outer_iter_mut() {
        let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            row.mapv_inplace(|x| x / n);
        }
    }
    out
}

/// Top-`k` eigenvectors of the normalized adjacency, rows L2-normalized, then k-means.
pub fn spectral_clustering(g: &Graph, k: usize, seed: u64) -> Result<ClusterAssignment> {
    let e = spectral_embedding(g, k)?;
    kmeans(row_normalize(e.vectors.view()).view(), k, seed)
}

/// k-means on the row-normalized rows of an embedding.
///
/// Centroids of the result are means of the normalized rows.
pub fn spectral_clustering_embedding(
    points: ArrayView2<'_, f64>,
    k: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    kmeans(row_normalize(points).view(), k, seed)
}

/// Per-cluster `assoc(C_i, C_i) / assoc(C_i, V)`.
pub fn n_asso_per_cluster(g: &Graph, clusters: &ClusterAssignment) -> Result<Vec<f64>> {
    if clusters.len() != g.num_nodes() {
        return Err(Error::invalid(format!(
            "cluster assignment covers {} nodes, graph has {}",
            clusters.len(),
            g.num_nodes()
        )));
    }
    let k = clusters.k();
    let mut within = vec![0.0; k];
    let mut vol = vec![0.0; k];
    for u in 0..g.num_nodes() {
        let cu = clusters.cluster_of(u);
        vol[cu] += g.degree(u);
        for (v, w) in g.row(u) {
            if clusters.cluster_of(v) == cu {
                within[cu] += w;
            }
        }
    }
    if let Some(c) = vol.iter().position(|&x| x <= 0.0) {
        return Err(Error::invalid(format!("cluster {c} has zero volume")));
    }
    Ok(within.iter().zip(&vol).map(|(a, v)| a / v).collect())
}

/// Normalized association `sum_i assoc(C_i, C_i) / assoc(C_i, V)`.
pub fn n_asso(g: &Graph, clusters: &ClusterAssignment) -> Result<f64> {
    Ok(n_asso_per_cluster(g, clusters)?.iter().sum())
}

/// Relaxed normalized association: the sum of the top-`k` eigenvalues of the
/// normalized adjacency, i.e. `tr(U^T A_sym U)` at the spectral optimum.
pub fn relaxed_n_asso(g: &Graph, k: usize) -> Result<f64> {
    Ok(spectral_embedding(g, k)?.values.iter().sum())
}
