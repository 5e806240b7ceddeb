use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::{Graph, DENSE_LIMIT};
use crate::linalg::jacobi;

/// The matrix DeepWalk implicitly factorizes:
/// `log(max(M, 1))` with `M = vol/(T b) * (sum_{r=1..T} P^r) D^-1`, `P = D^-1 A`.
pub fn netmf_matrix(g: &Graph, window: usize, negatives: usize) -> Result<Array2<f64>> {
    let n = g.num_nodes();
    if n > DENSE_LIMIT {
        return Err(Error::Capacity { what: "NetMF matrix", size: n, limit: DENSE_LIMIT });
    }
    if window == 0 || negatives == 0 {
        return Err(Error::invalid("window and negatives must be at least 1"));
    }
    let iso = g.isolated_nodes();
    if !iso.is_empty() {
        return Err(Error::invalid(format!("zero-degree nodes: {iso:?}")));
    }
    let mut p = Array2::<f64>::zeros((n, n));
    for u in 0..n {
        let du = g.degree(u);
        for (v, w) in g.row(u) {
            p[[u, v]] = w / du;
        }
    }
    let mut term = p.clone();
    let mut sum = p.clone();
    for _ in 1..window {
        term = term.dot(&p);
        sum += &term;
    }
    let scale = g.volume() / (window as f64 * negatives as f64);
    for ((_, j), x) in sum.indexed_iter_mut() {
        let m = scale * *x / g.degree(j);
        *x = m.max(1.0).ln();
    }
    Ok(sum)
}

/// `U_k * Sigma_k^{1/2}` from the top-`k` singular triplets of `m`.
///
/// The right singular vectors come from the Jacobi eigensolver on `m^T m`;
/// left vectors are `m v / sigma`. Directions with zero singular value are
/// returned as zero columns.
pub fn svd_embedding(m: ArrayView2<'_, f64>, k: usize) -> Result<Array2<f64>> {
    let (rows, cols) = m.dim();
    if k > cols.min(rows) {
        return Err(Error::invalid(format!("k = {k} exceeds matrix rank bound {}", cols.min(rows))));
    }
    let gram = m.t().dot(&m);
    // round off the asymmetry introduced by floating-point products
    let gram = (&gram + &gram.t()) * 0.5;
    let eig = jacobi::eigh(gram.view())?;
    let mut z = Array2::<f64>::zeros((rows, k));
    for c in 0..k {
        let sigma = eig.values[c].max(0.0).sqrt();
        if sigma <= 1e-12 {
            continue;
        }
        let u = m.dot(&eig.vectors.column(c)) / sigma;
        z.column_mut(c).assign(&(u * sigma.sqrt()));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, erdos_renyi};

    #[test]
    fn k2_single_window() {
        let m = netmf_matrix(&complete(2).unwrap(), 1, 1).unwrap();
        let l2 = 2f64.ln();
        assert!((m[[0, 1]] - l2).abs() < 1e-15 && (m[[1, 0]] - l2).abs() < 1e-15);
        assert_eq!(m[[0, 0]], 0.0);
    }

    #[test]
    fn small_entries_clip_to_zero() {
        // vol / (T b) = 6 / 30 makes every M entry below 1
        let m = netmf_matrix(&complete(3).unwrap(), 3, 10).unwrap();
        assert!(m.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn symmetric() {
        let g = erdos_renyi(25, 0.3, 8).unwrap();
        let g = if g.isolated_nodes().is_empty() { g } else { complete(25).unwrap() };
        let m = netmf_matrix(&g, 5, 1).unwrap();
        for i in 0..25 {
            for j in 0..25 {
                assert!((m[[i, j]] - m[[j, i]]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn svd_reconstructs_rank_one() {
        let m = ndarray::array![[2.0, 4.0], [1.0, 2.0]];
        let z = svd_embedding(m.view(), 1).unwrap();
        // for a symmetric-free rank one matrix, z z^T has the singular value on the diagonal scale
        let sigma: f64 = 25f64.sqrt();
        let zz: f64 = z.column(0).iter().map(|x| x * x).sum();
        assert!((zz - sigma).abs() < 1e-10);
    }
}
