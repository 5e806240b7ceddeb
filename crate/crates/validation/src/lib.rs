//! Reference implementations used only to check the main crate.
//!
//! Everything here is written from the definitions, in the most direct (and
//! slowest) form, and shares no code with `bridgeness` beyond reading a
//! graph's edges and an embedding's entries.

use bridgeness::{EmbeddingMatrix, Graph};
use ndarray::Array2;

/// Dense adjacency, self-loops on the diagonal once.
pub fn adjacency(g: &Graph) -> Array2<f64> {
    let n = g.num_nodes();
    let mut a = Array2::zeros((n, n));
    for (u, v, w) in g.edges() {
        a[[u, v]] = w;
        a[[v, u]] = w;
    }
    a
}

pub fn degrees(g: &Graph) -> Vec<f64> {
    adjacency(g).rows().into_iter().map(|r| r.sum()).collect()
}

/// All eigenvalues of a symmetric matrix, descending, by classical Jacobi
/// (largest off-diagonal entry first).
pub fn eigenvalues(m: &Array2<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 * n * n + 100 {
        let (mut p, mut q, mut big) = (0, 0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                if a[[i, j]].abs() > big {
                    big = a[[i, j]].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if big <= 1e-16 * total.max(1e-300) {
            break;
        }
        let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let t = if theta == 0.0 { 1.0 } else { t };
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        for k in 0..n {
            let (akp, akq) = (a[[k, p]], a[[k, q]]);
            a[[k, p]] = c * akp - s * akq;
            a[[k, q]] = s * akp + c * akq;
        }
        for k in 0..n {
            let (apk, aqk) = (a[[p, k]], a[[q, k]]);
            a[[p, k]] = c * apk - s * aqk;
            a[[q, k]] = s * apk + c * aqk;
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Sum of the `k` largest eigenvalues of `D^-1/2 A D^-1/2`.
pub fn relaxed_n_asso(g: &Graph, k: usize) -> f64 {
    let a = adjacency(g);
    let d = degrees(g);
    let n = d.len();
    let m = Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] / (d[i] * d[j]).sqrt());
    eigenvalues(&m)[..k].iter().sum()
}

/// `assoc(C, C) / assoc(C, V)` for each cluster.
pub fn n_asso_per_cluster(g: &Graph, labels: &[usize], k: usize) -> Vec<f64> {
    let a = adjacency(g);
    let n = labels.len();
    (0..k)
        .map(|c| {
            let (mut within, mut vol) = (0.0, 0.0);
            for i in (0..n).filter(|&i| labels[i] == c) {
                for j in 0..n {
                    vol += a[[i, j]];
                    if labels[j] == c {
                        within += a[[i, j]];
                    }
                }
            }
            within / vol
        })
        .collect()
}

pub fn n_asso(g: &Graph, labels: &[usize], k: usize) -> f64 {
    n_asso_per_cluster(g, labels, k).iter().sum()
}

/// Total weight of `v`'s edges to other clusters.
pub fn bridgeness(g: &Graph, labels: &[usize], v: usize) -> f64 {
    let a = adjacency(g);
    (0..labels.len()).filter(|&j| labels[j] != labels[v]).map(|j| a[[v, j]]).sum()
}

pub fn bridgeness_all(g: &Graph, labels: &[usize]) -> Vec<f64> {
    (0..g.num_nodes()).map(|v| bridgeness(g, labels, v)).collect()
}

/// Average ranks by counting smaller and equal values.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let below = x.iter().filter(|&&y| y < xi).count() as f64;
            let equal = x.iter().filter(|&&y| y == xi).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Spearman's rho with ties, in closed form:
/// `(Sx + Sy - sum d^2) / (2 sqrt(Sx Sy))`, `Sx = (n^3 - n - sum(t^3 - t)) / 12`.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ra, rb) = (ranks(a), ranks(b));
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    let ties = |x: &[f64]| -> f64 {
        let mut seen: Vec<f64> = Vec::new();
        let mut s = 0.0;
        for &v in x {
            if !seen.contains(&v) {
                seen.push(v);
                let t = x.iter().filter(|&&y| y == v).count() as f64;
                s += t * t * t - t;
            }
        }
        s
    };
    let sx = (n * n * n - n - ties(a)) / 12.0;
    let sy = (n * n * n - n - ties(b)) / 12.0;
    (sx + sy - d2) / (2.0 * (sx * sy).sqrt())
}

/// `m` nearest rows to row `i` (excluding `i`), by squared Euclidean distance
/// then id.
pub fn nearest(points: &Array2<f64>, i: usize, m: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = (0..points.nrows())
        .filter(|&j| j != i)
        .map(|j| {
            let d: f64 = points.row(i).iter().zip(points.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, j)
        })
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    all.into_iter().take(m).map(|x| x.1).collect()
}

pub fn imp(w: &Array2<f64>, wp: &Array2<f64>, m: usize) -> f64 {
    let n = w.nrows();
    let lost: f64 = (0..n)
        .map(|i| {
            let (a, b) = (nearest(w, i, m), nearest(wp, i, m));
            1.0 - a.iter().filter(|x| b.contains(x)).count() as f64 / m as f64
        })
        .sum();
    lost / n as f64
}

/// Every (i, j, k) with i, j in one cluster and k in another satisfies
/// `dist(i, j) < dist(k, j)`.
pub fn is_good_embedding(points: &Array2<f64>, labels: &[usize]) -> bool {
    let n = labels.len();
    let dist = |a: usize, b: usize| -> f64 {
        points.row(a).iter().zip(points.row(b)).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    for j in 0..n {
        let intra = (0..n).filter(|&i| labels[i] == labels[j]).map(|i| dist(i, j)).fold(0.0, f64::max);
        let inter = (0..n).filter(|&k| labels[k] != labels[j]).map(|k| dist(k, j)).fold(f64::INFINITY, f64::min);
        if intra >= inter {
            return false;
        }
    }
    true
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Mean over all neighbours (self-loops excluded) of
/// `|1 - sigma(w_b . w_i)| * |w_b|`, optionally weighted by
/// `1 + max(0, cos(w_b - w_i, w_b))` (the negative gradient is parallel to `w_b`).
pub fn gradient_score(g: &Graph, emb: &EmbeddingMatrix, v: usize, weighted: bool) -> f64 {
    let w = emb.target();
    let wb = w.row(v);
    let nb: f64 = wb.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nbrs: Vec<usize> = g.edges().filter_map(|(a, b, _)| {
        if a == b {
            None
        } else if a == v {
            Some(b)
        } else if b == v {
            Some(a)
        } else {
            None
        }
    }).collect();
    if nbrs.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &i in &nbrs {
        let wi = w.row(i);
        let dot: f64 = wb.iter().zip(wi).map(|(a, b)| a * b).sum();
        let mag = (1.0 - sigmoid(dot)) * nb;
        let h = if weighted {
            let diff: Vec<f64> = wb.iter().zip(wi).map(|(a, b)| a - b).collect();
            let nd: f64 = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c = if nd == 0.0 || nb == 0.0 || mag == 0.0 {
                0.0
            } else {
                diff.iter().zip(wb).map(|(a, b)| a * b).sum::<f64>() / (nd * nb)
            };
            1.0 + c.max(0.0)
        } else {
            1.0
        };
        total += h * mag;
    }
    total / nbrs.len() as f64
}

/// Mean cross-entropy of a two-layer ReLU/softmax network.
pub fn mlp_loss(w1: &Array2<f64>, b1: &[f64], w2: &Array2<f64>, b2: &[f64], x: &Array2<f64>, y: &[usize]) -> f64 {
    let mut total = 0.0;
    for (r, &label) in y.iter().enumerate() {
        let hidden: Vec<f64> = (0..w1.ncols())
            .map(|h| ((0..w1.nrows()).map(|i| x[[r, i]] * w1[[i, h]]).sum::<f64>() + b1[h]).max(0.0))
            .collect();
        let logits: Vec<f64> =
            (0..w2.ncols()).map(|c| (0..w2.nrows()).map(|h| hidden[h] * w2[[h, c]]).sum::<f64>() + b2[c]).collect();
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
        total += lse - logits[label];
    }
    total / y.len() as f64
}

pub fn median(mut x: Vec<f64>) -> f64 {
    x.sort_by(f64::total_cmp);
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        (x[n / 2 - 1] + x[n / 2]) / 2.0
    }
}
