//! Lanczos iteration with full reorthogonalization.
//!
//! The Krylov basis is kept in full and every new direction is orthogonalized
//! against all previous ones twice, so the tridiagonal projection stays
//! faithful up to the full dimension. When the Krylov space becomes invariant
//! (a breakdown, which is exact for graphs with disconnected components) the
//! iteration restarts from a fresh random direction orthogonal to the basis,
//! so repeated eigenvalues are still recovered.

use ndarray::{Array2, ArrayView2};
use rand::Rng;

use super::tridiagonal::eigh_tridiagonal;
use super::{check_symmetric, dot, frobenius, norm, EigenDecomposition};
use crate::error::{Error, Result};
use crate::seed;

const START_SEED: u64 = 0x01A2_C705;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Cap on matrix-vector products; defaults to `10 * n`.
    pub max_iter: Option<usize>,
    /// Ritz residual tolerance relative to `||A||_F`.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_iter: None, tol: 1e-12 }
    }
}

/// Top-`k` algebraically largest eigenpairs of a symmetric matrix.
pub fn top_k(m: ArrayView2<'_, f64>, k: usize) -> Result<EigenDecomposition> {
    top_k_with(m, k, LanczosOptions::default())
}

pub fn top_k_with(m: ArrayView2<'_, f64>, k: usize, opts: LanczosOptions) -> Result<EigenDecomposition> {
    check_symmetric(m, 1e-10)?;
    let n = m.nrows();
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds matrix size {n}")));
    }
    if k == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: Array2::zeros((n, 0)) });
    }
    let anorm = frobenius(m);
    if anorm == 0.0 {
        let mut vectors = Array2::zeros((n, k));
        for i in 0..k {
            vectors[[i, i]] = 1.0;
        }
        return Ok(EigenDecomposition { values: vec![0.0; k], vectors });
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n);
    // Ritz values of a short Krylov space cannot reveal multiplicities, so
    // convergence is only tested once the basis is comfortably larger than k.
    let min_basis = n.min((2 * k + 20).max(40));

    let mut rng = seed::rng(START_SEED);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n.min(max_iter));
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = random_unit(&mut rng, n, &basis)
        .ok_or_else(|| Error::Numerical("could not draw a Lanczos start vector".into()))?;
    let mut iter = 0;

    loop {
        iter += 1;
        if iter > max_iter {
            return Err(Error::Numerical(format!(
                "Lanczos did not converge within {max_iter} iterations"
            )));
        }
        let mut w: Vec<f64> =
            m.outer_iter().map(|row| row.iter().zip(&q).map(|(a, b)| a * b).sum()).collect();
        let alpha = dot(&q, &w);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= alpha * qi;
        }
        if let (Some(prev), Some(&beta)) = (basis.last(), betas.last()) {
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= beta * pi;
            }
        }
        basis.push(q);
        alphas.push(alpha);
        for _ in 0..2 {
            orthogonalize(&mut w, &basis);
        }
        let mut beta = norm(&w);
        let size = basis.len();

        if size == n || (size >= min_basis && size >= k) {
            let (vals, s) = eigh_tridiagonal(&alphas, &betas)?;
            let top: Vec<usize> = (0..size).rev().take(k).collect();
            let converged = size == n
                || top.iter().all(|&i| (beta * s[[size - 1, i]]).abs() <= opts.tol * anorm);
            if converged {
                return Ok(ritz_pairs(&basis, &vals, &s, &top, n));
            }
        }

        if beta <= 1e-10 * anorm {
            match random_unit(&mut rng, n, &basis) {
                Some(fresh) => {
                    w = fresh;
                    beta = 0.0;
                }
                None => {
                    let (vals, s) = eigh_tridiagonal(&alphas, &betas)?;
                    let top: Vec<usize> = (0..size).rev().take(k).collect();
                    return Ok(ritz_pairs(&basis, &vals, &s, &top, n));
                }
            }
        } else {
            for wi in w.iter_mut() {
                *wi /= beta;
            }
        }
        betas.push(beta);
        q = w;
    }
}

fn ritz_pairs(basis: &[Vec<f64>], vals: &[f64], s: &Array2<f64>, top: &[usize], n: usize) -> EigenDecomposition {
    let mut vectors = Array2::<f64>::zeros((n, top.len()));
    for (col, &i) in top.iter().enumerate() {
        for (j, qj) in basis.iter().enumerate() {
            let c = s[[j, i]];
            if c != 0.0 {
                for r in 0..n {
                    vectors[[r, col]] += c * qj[r];
                }
            }
        }
        let nrm = vectors.column(col).iter().map(|x| x * x).sum::<f64>().sqrt();
        vectors.column_mut(col).mapv_inplace(|x| x / nrm);
    }
    let mut out = EigenDecomposition { values: top.iter().map(|&i| vals[i]).collect(), vectors };
    out.fix_signs();
    out
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(w, b);
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi -= c * bi;
        }
    }
}

fn random_unit(rng: &mut impl Rng, n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        for _ in 0..2 {
            orthogonalize(&mut v, basis);
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}
