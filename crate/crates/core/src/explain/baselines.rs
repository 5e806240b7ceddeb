use super::ScoreVector;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy)]
pub struct PageRankOptions {
    pub damping: f64,
    /// Convergence when the L1 change drops below `n * tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        Self { damping: 0.85, tol: 1e-6, max_iter: 100 }
    }
}

/// PageRank by power iteration with uniform teleport. Mass on nodes without
/// edges is spread uniformly each step.
pub fn ppr_scores(g: &Graph) -> Result<ScoreVector> {
    ppr_scores_with(g, PageRankOptions::default())
}

pub fn ppr_scores_with(g: &Graph, opts: PageRankOptions) -> Result<ScoreVector> {
    let n = g.num_nodes();
    if n == 0 {
        return Err(Error::invalid("PageRank of an empty graph"));
    }
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    for _ in 0..opts.max_iter {
        let dangling: f64 = (0..n).filter(|&v| g.degree(v) == 0.0).map(|v| x[v]).sum();
        let base = opts.damping * dangling / nf + (1.0 - opts.damping) / nf;
        let mut next = vec![base; n];
        for (u, &xu) in x.iter().enumerate() {
            let d = g.degree(u);
            if d == 0.0 {
                continue;
            }
            for (v, w) in g.row(u) {
                next[v] += opts.damping * xu * w / d;
            }
        }
        let err: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if err < nf * opts.tol {
            return Ok(ScoreVector::new("ppr", x));
        }
    }
    Err(Error::Numerical(format!("PageRank did not converge in {} iterations", opts.max_iter)))
}

/// Weighted degree as the importance score.
pub fn degree_scores(g: &Graph) -> ScoreVector {
    ScoreVector::new("degree", g.degrees().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ring, star};

    #[test]
    fn ring_is_uniform() {
        let s = ppr_scores(&ring(7).unwrap()).unwrap();
        assert!(s.scores().iter().all(|x| (x - 1.0 / 7.0).abs() < 1e-12));
    }

    #[test]
    fn star_centre_wins() {
        let s = ppr_scores(&star(5).unwrap()).unwrap();
        assert_eq!(s.top_q(1), vec![0]);
        assert!((1..5).all(|v| s.score(0) > s.score(v)));
        assert_eq!(degree_scores(&star(5).unwrap()).top_q(1), vec![0]);
    }

    #[test]
    fn sums_to_one_with_isolated_node() {
        let g = Graph::from_unweighted(4, [(0, 1), (1, 2)]).unwrap();
        let s = ppr_scores(&g).unwrap();
        assert!((s.scores().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_an_error() {
        let opts = PageRankOptions { max_iter: 1, tol: 0.0, ..PageRankOptions::default() };
        assert!(matches!(ppr_scores_with(&star(5).unwrap(), opts), Err(Error::Numerical(_))));
    }
}
