use ndarray::Array2;

use super::Graph;
use crate::error::{Error, Result};

/// Largest node count for which dense `n x n` matrices are built.
pub const DENSE_LIMIT: usize = 2048;

pub(crate) fn check_dense(what: &'static str, n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::Capacity { what, size: n, limit: DENSE_LIMIT });
    }
    Ok(())
}

pub(crate) fn check_no_isolated(g: &Graph) -> Result<()> {
    let iso = g.isolated_nodes();
    if !iso.is_empty() {
        return Err(Error::invalid(format!("zero-degree nodes: {iso:?}")));
    }
    Ok(())
}

/// Weighted power transformation `(sum_{t=1..r} (D^-1 A)^t) D^-1`.
pub fn weighted_power_graph(g: &Graph, r: usize) -> Result<Array2<f64>> {
    check_dense("weighted power graph", g.num_nodes())?;
    check_no_isolated(g)?;
    if r == 0 {
        return Err(Error::invalid("power r must be at least 1"));
    }
    let n = g.num_nodes();
    let mut p = Array2::<f64>::zeros((n, n));
    for u in 0..n {
        let du = g.degree(u);
        for (v, w) in g.row(u) {
            p[[u, v]] = w / du;
        }
    }
    let mut term = p.clone();
    let mut sum = p.clone();
    for _ in 1..r {
        term = term.dot(&p);
        sum += &term;
    }
    for j in 0..n {
        let dj = g.degree(j);
        sum.column_mut(j).mapv_inplace(|x| x / dj);
    }
    Ok(sum)
}
