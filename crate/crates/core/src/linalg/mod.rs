//! Dense symmetric eigensolvers.
//!
//! [`lanczos::top_k`] is the production path. [`jacobi::eigh`] is an
//! independent cyclic Jacobi solver used as the reference oracle and for the
//! small Gram matrices of the NetMF factorization.

pub mod jacobi;
pub mod lanczos;
mod tridiagonal;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Eigenpairs in descending eigenvalue order; column `m` of `vectors` pairs
/// with `values[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

impl EigenDecomposition {
    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// Flip columns so the first entry with magnitude above `1e-12` is positive.
    pub(crate) fn fix_signs(&mut self) {
        for mut col in self.vectors.columns_mut() {
            if let Some(&first) = col.iter().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    col.mapv_inplace(|x| -x);
                }
            }
        }
    }

    /// Order by descending value, keeping column pairing.
    pub(crate) fn sorted_desc(values: Vec<f64>, vectors: Array2<f64>) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let vals = idx.iter().map(|&i| values[i]).collect();
        let vecs = vectors.select(ndarray::Axis(1), &idx);
        EigenDecomposition { values: vals, vectors: vecs }
    }
}

pub(crate) fn frobenius(m: ArrayView2<'_, f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn check_symmetric(m: ArrayView2<'_, f64>, tol: f64) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    let scale = frobenius(m).max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (m[[i, j]] - m[[j, i]]).abs() > tol * scale {
                return Err(Error::invalid(format!(
                    "matrix not symmetric at ({i}, {j}): {} vs {}",
                    m[[i, j]],
                    m[[j, i]]
                )));
            }
        }
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
