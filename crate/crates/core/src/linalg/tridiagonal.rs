//! Implicit-shift QL on a symmetric tridiagonal matrix (EISPACK `tql2`).

use ndarray::Array2;

use crate::error::{Error, Result};

/// Eigenvalues (ascending) and eigenvectors (columns) of the tridiagonal
/// matrix with diagonal `diag` and super-diagonal `off` (`off.len() == diag.len() - 1`).
pub(crate) fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut v = Array2::<f64>::eye(n);
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 * n.max(1) {
                    return Err(Error::Numerical("tridiagonal QL did not converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[[k, i + 1]];
                        v[[k, i + 1]] = s * v[[k, i]] + c * h;
                        v[[k, i]] = c * v[[k, i]] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = idx.iter().map(|&i| d[i]).collect();
    let vecs = v.select(ndarray::Axis(1), &idx);
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let (vals, vecs) = eigh_tridiagonal(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15);
        assert!((vals[1] - 1.0).abs() < 1e-15);
        assert!((vecs[[0, 1]].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn path_laplacian_like() {
        // eigenvalues of the path adjacency on 5 nodes: 2 cos(k pi / 6)
        let (vals, _) = eigh_tridiagonal(&[0.0; 5], &[1.0; 4]).unwrap();
        for (k, v) in vals.iter().rev().enumerate() {
            let want = 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 6.0).cos();
            assert!((v - want).abs() < 1e-13, "{v} vs {want}");
        }
    }

    #[test]
    fn single_and_empty() {
        let (vals, vecs) = eigh_tridiagonal(&[4.0], &[]).unwrap();
        assert_eq!(vals, vec![4.0]);
        assert_eq!(vecs[[0, 0]], 1.0);
        let (vals, _) = eigh_tridiagonal(&[], &[]).unwrap();
        assert!(vals.is_empty());
    }
}
