use ndarray::ArrayView2;
use rand::Rng;

use super::{ScoreVector, WeightVariant};
use crate::clusters::ClusterAssignment;
use crate::embedding::{ns_gradient, sigmoid, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{neighbors, Graph};
use crate::linalg::{dot, norm};
use crate::par::Execution;
use crate::seed;

/// Cosine similarity, defined as 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `h(v_b, v_i)`: how strongly the update of `w_i` points from `w_i` towards `w_b`.
pub fn directional_weight(w_b: &[f64], w_i: &[f64], grad: &[f64], variant: WeightVariant) -> f64 {
    let diff = sub(w_b, w_i);
    let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
    let cos = || cosine(&diff, &neg);
    match variant {
        WeightVariant::Base => 1.0 + cos().max(0.0),
        WeightVariant::PlusMinus => 1.0 + cos(),
        WeightVariant::Abs => 1.0 + cos().abs(),
        WeightVariant::Sigmoid => 1.0 + sigmoid(dot(&diff, &neg)),
        WeightVariant::Tanh => 1.0 + dot(&diff, &neg).tanh(),
        WeightVariant::Angular(theta) => {
            let c = cos();
            if c >= theta.to_radians().cos() {
                1.0 + c
            } else {
                1.0
            }
        }
    }
}

fn row(emb: &EmbeddingMatrix, v: usize) -> &[f64] {
    emb.target().row(v).to_slice().expect("embedding rows are contiguous")
}

fn aggregate(g: &Graph, emb: &EmbeddingMatrix, v_b: usize, psi: usize, seed: u64, weight: Option<WeightVariant>) -> f64 {
    let nbrs = neighbors(g, v_b, psi, seed);
    if nbrs.is_empty() {
        return 0.0;
    }
    let w_b = row(emb, v_b);
    let mut total = 0.0;
    for &i in &nbrs {
        let w_i = row(emb, i);
        let grad = ns_gradient(w_b, w_i);
        let mag = norm(&grad);
        let h = weight.map_or(1.0, |variant| directional_weight(w_b, w_i, &grad, variant));
        total += h * mag;
    }
    total / nbrs.len() as f64
}

/// GRAPH-GD: mean gradient magnitude over up to `psi` sampled neighbours.
/// Nodes without neighbours score 0.
pub fn graph_gd(g: &Graph, emb: &EmbeddingMatrix, v_b: usize, psi: usize, seed: u64) -> f64 {
    aggregate(g, emb, v_b, psi, seed, None)
}

/// GRAPH-wGD: as [`graph_gd`] with each magnitude weighted by [`directional_weight`].
pub fn graph_wgd(g: &Graph, emb: &EmbeddingMatrix, v_b: usize, psi: usize, variant: WeightVariant, seed: u64) -> f64 {
    aggregate(g, emb, v_b, psi, seed, Some(variant))
}

fn score_all(
    g: &Graph,
    emb: &EmbeddingMatrix,
    psi: usize,
    run_seed: u64,
    exec: Execution,
    weight: Option<WeightVariant>,
    method: String,
) -> Result<ScoreVector> {
    if emb.rows() != g.num_nodes() {
        return Err(Error::invalid(format!(
            "embedding has {} rows, graph has {} nodes",
            emb.rows(),
            g.num_nodes()
        )));
    }
    if psi == 0 {
        return Err(Error::invalid("psi must be at least 1"));
    }
    let scores = exec.map(g.num_nodes(), |v| aggregate(g, emb, v, psi, seed::derive(run_seed, v as u64), weight));
    let isolated: Vec<bool> = (0..g.num_nodes()).map(|v| g.neighbor_count(v) == 0).collect();
    let count = isolated.iter().filter(|&&x| x).count();
    if count > 0 {
        log::warn!("{count} node(s) without neighbours scored 0 and ranked last");
    }
    Ok(ScoreVector::with_unranked(method, scores, isolated))
}

/// GRAPH-GD for every node. Node `v` samples neighbours with `derive(run_seed, v)`.
pub fn graph_gd_scores(g: &Graph, emb: &EmbeddingMatrix, psi: usize, run_seed: u64, exec: Execution) -> Result<ScoreVector> {
    score_all(g, emb, psi, run_seed, exec, None, "graph_gd".into())
}

pub fn graph_wgd_scores(
    g: &Graph,
    emb: &EmbeddingMatrix,
    psi: usize,
    variant: WeightVariant,
    run_seed: u64,
    exec: Execution,
) -> Result<ScoreVector> {
    let name = match variant {
        WeightVariant::Base => "graph_wgd".to_string(),
        v => format!("graph_wgd({v})"),
    };
    score_all(g, emb, psi, run_seed, exec, Some(variant), name)
}

/// Whether `w_i` supports `w_b` bridging towards a cluster with centroid
/// `centroid`: `cos(w_b - w_i, w_b - centroid) > 0`.
pub fn is_support_node(w_b: &[f64], w_i: &[f64], centroid: &[f64]) -> bool {
    cosine(&sub(w_b, w_i), &sub(w_b, centroid)) > 0.0
}

/// Above this many points [`is_good_embedding`] samples triples instead of
/// checking all of them.
pub const GOOD_EMBEDDING_EXHAUSTIVE_LIMIT: usize = 200;
const SAMPLED_TRIPLES: usize = 1_000_000;
const MAX_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GoodEmbedding {
    pub good: bool,
    /// Up to 100 triples `(i, j, k)` with `i, j` together, `k` elsewhere and
    /// `dist(i, j) >= dist(k, j)`.
    pub violations: Vec<(usize, usize, usize)>,
    pub triples_checked: u64,
    pub exhaustive: bool,
}

/// Check that every intra-cluster distance to a point is smaller than every
/// inter-cluster distance to it.
pub fn is_good_embedding(points: ArrayView2<'_, f64>, clusters: &ClusterAssignment) -> Result<GoodEmbedding> {
    let n = points.nrows();
    if clusters.len() != n {
        return Err(Error::invalid(format!("{} cluster labels for {n} points", clusters.len())));
    }
    let dist = |a: usize, b: usize| -> f64 {
        points.row(a).iter().zip(points.row(b)).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    let c = |v: usize| clusters.cluster_of(v);
    let mut violations = Vec::new();
    let mut checked = 0u64;
    if n <= GOOD_EMBEDDING_EXHAUSTIVE_LIMIT {
        let mut any = false;
        for j in 0..n {
            let intra: Vec<(f64, usize)> = (0..n).filter(|&i| c(i) == c(j)).map(|i| (dist(i, j), i)).collect();
            let inter: Vec<(f64, usize)> = (0..n).filter(|&k| c(k) != c(j)).map(|k| (dist(k, j), k)).collect();
            checked += (intra.len() * inter.len()) as u64;
            let max_intra = intra.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
            let min_inter = inter.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
            if max_intra < min_inter {
                continue;
            }
            any = true;
            for &(di, i) in &intra {
                for &(dk, k) in &inter {
                    if di >= dk && violations.len() < MAX_VIOLATIONS {
                        violations.push((i, j, k));
                    }
                }
            }
        }
        return Ok(GoodEmbedding { good: !any, violations, triples_checked: checked, exhaustive: true });
    }
    let mut rng = seed::rng(0x676F_6F64);
    let members: Vec<Vec<usize>> = (0..clusters.k()).map(|m| clusters.members(m)).collect();
    let mut any = false;
    for _ in 0..SAMPLED_TRIPLES {
        let j = rng.random_range(0..n);
        let own = &members[c(j)];
        if members.len() < 2 {
            break;
        }
        let i = own[rng.random_range(0..own.len())];
        let k = loop {
            let k = rng.random_range(0..n);
            if c(k) != c(j) {
                break k;
            }
        };
        checked += 1;
        if dist(i, j) >= dist(k, j) {
            any = true;
            if violations.len() < MAX_VIOLATIONS {
                violations.push((i, j, k));
            }
        }
    }
    Ok(GoodEmbedding { good: !any, violations, triples_checked: checked, exhaustive: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn directional_weight_examples() {
        let w_b = [1.0, 0.0];
        let w_i = [0.0, 0.0];
        let along = [-1.0, 0.0]; // -grad parallel to w_b - w_i
        let against = [1.0, 0.0];
        assert_eq!(directional_weight(&w_b, &w_i, &along, WeightVariant::Base), 2.0);
        assert_eq!(directional_weight(&w_b, &w_i, &against, WeightVariant::Base), 1.0);
        assert_eq!(directional_weight(&w_b, &w_i, &against, WeightVariant::Abs), 2.0);
        assert_eq!(directional_weight(&w_b, &w_i, &against, WeightVariant::PlusMinus), 0.0);
        assert_eq!(directional_weight(&w_b, &w_b, &along, WeightVariant::Base), 1.0);
        let diag = [-1.0, -1.0]; // 45 degrees off
        assert_eq!(directional_weight(&w_b, &w_i, &diag, WeightVariant::Angular(30.0)), 1.0);
        let h = directional_weight(&w_b, &w_i, &diag, WeightVariant::Angular(60.0));
        assert!((h - 1.0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn gd_single_neighbour_example() {
        let g = Graph::from_unweighted(2, [(0, 1)]).unwrap();
        let e = EmbeddingMatrix::from_target(array![[1.0, 0.0], [2.0, 0.0]]);
        let want = 1.0 - 1.0 / (1.0 + (-2f64).exp());
        assert!((graph_gd(&g, &e, 0, 100, 0) - want).abs() < 1e-15);
        assert!((graph_gd(&g, &e, 0, 100, 0) - 0.1192).abs() < 1e-4);
    }

    #[test]
    fn zero_embedding_scores_zero() {
        let g = crate::graph::karate();
        let e = EmbeddingMatrix::from_target(Array2::zeros((34, 4)));
        let gd = graph_gd_scores(&g, &e, 100, 1, Execution::default()).unwrap();
        let wgd = graph_wgd_scores(&g, &e, 100, WeightVariant::Base, 1, Execution::default()).unwrap();
        assert!(gd.scores().iter().chain(wgd.scores()).all(|&s| s == 0.0));
    }

    #[test]
    fn isolated_nodes_rank_last() {
        let g = Graph::from_unweighted(3, [(1, 2)]).unwrap();
        let e = EmbeddingMatrix::from_target(array![[1.0], [1.0], [-1.0]]);
        let s = graph_gd_scores(&g, &e, 10, 0, Execution::Sequential).unwrap();
        assert_eq!(s.score(0), 0.0);
        assert_eq!(*s.ranking().last().unwrap(), 0);
    }

    #[test]
    fn support_node_examples() {
        let w_b = [0.0, 0.0];
        let centroid = [4.0, 0.0];
        assert!(is_support_node(&w_b, &[2.0, 0.0], &centroid));
        assert!(!is_support_node(&w_b, &[-2.0, 0.0], &centroid));
        assert!(!is_support_node(&w_b, &[0.0, 2.0], &centroid));
        assert!(!is_support_node(&w_b, &w_b, &centroid));
    }

    #[test]
    fn good_embedding_examples() {
        let c = ClusterAssignment::from_labels(vec![0, 0, 1, 1], 2).unwrap();
        let apart = array![[0.0, 0.0], [0.0, 0.0], [10.0, 0.0], [10.0, 0.0]];
        assert!(is_good_embedding(apart.view(), &c).unwrap().good);
        let mixed = array![[0.0, 0.0], [10.0, 0.0], [0.1, 0.0], [10.1, 0.0]];
        let r = is_good_embedding(mixed.view(), &c).unwrap();
        assert!(!r.good && !r.violations.is_empty());
        assert!(r.exhaustive);
    }
}
