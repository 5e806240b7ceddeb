use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;

use crate::clusters::{centroids_of, ClusterAssignment};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::seed;

#[derive(Debug, Clone, Copy)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub execution: Execution,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self { restarts: 10, max_iter: 300, execution: Execution::default() }
    }
}

/// Lloyd's k-means with k-means++ seeding; the lowest-inertia of 10 restarts wins.
pub fn kmeans(points: ArrayView2<'_, f64>, k: usize, seed: u64) -> Result<ClusterAssignment> {
    kmeans_with(points, k, seed, KMeansOptions::default())
}

pub fn kmeans_with(
    points: ArrayView2<'_, f64>,
    k: usize,
    seed: u64,
    opts: KMeansOptions,
) -> Result<ClusterAssignment> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k-means needs 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("k-means input has non-finite entries".into()));
    }
    let runs = opts
        .execution
        .map(opts.restarts.max(1), |r| lloyd(points, k, opts.max_iter, seed::derive(seed, r as u64)));
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = r;
        }
    }
    let assignment = runs.into_iter().nth(best).map(|r| r.0).unwrap_or_default();
    ClusterAssignment::from_points(points, assignment, k)
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: ArrayView1<'_, f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centroids.outer_iter().enumerate() {
        let d = sq_dist(p, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(points: ArrayView2<'_, f64>, k: usize, rng: &mut impl Rng) -> Array2<f64> {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.outer_iter().map(|p| sq_dist(p, points.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            // all remaining points coincide with a centre: take any unused index
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, p) in points.outer_iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, points.row(next)));
        }
    }
    points.select(ndarray::Axis(0), &chosen)
}

fn lloyd(points: ArrayView2<'_, f64>, k: usize, max_iter: usize, seed: u64) -> (Vec<usize>, f64) {
    let n = points.nrows();
    let mut rng = seed::rng(seed);
    let mut centroids = plus_plus(points, k, &mut rng);
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..max_iter {
        let next: Vec<usize> = points.outer_iter().map(|p| nearest(p, &centroids).0).collect();
        let mut next = next;
        reseed_empty(points, &mut next, k);
        if next == assignment {
            break;
        }
        assignment = next;
        centroids = centroids_of(points, &assignment, k);
    }
    let inertia = points
        .outer_iter()
        .zip(&assignment)
        .map(|(p, &a)| sq_dist(p, centroids.row(a)))
        .sum();
    (assignment, inertia)
}

/// Move the point farthest from its centroid into each empty cluster. Only
/// points from clusters with more than one member are eligible, so no cluster
/// is emptied in the process.
fn reseed_empty(points: ArrayView2<'_, f64>, assignment: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &a in assignment.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        let centroids = centroids_of(points, assignment, k);
        let mut far = None;
        let mut far_d = -1.0;
        for (i, p) in points.outer_iter().enumerate() {
            let a = assignment[i];
            if sizes[a] < 2 {
                continue;
            }
            let d = sq_dist(p, centroids.row(a));
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        match far {
            Some(i) => assignment[i] = empty,
            None => return,
        }
    }
}
