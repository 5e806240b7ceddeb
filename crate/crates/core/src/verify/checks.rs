use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{settle, Check, Suite, SuiteReport};
use crate::clusters::ClusterAssignment;
use crate::embedding::ns_gradient;
use crate::error::Result;
use crate::eval::{spearman_values, MlpModel};
use crate::explain::imp;
use crate::graph::{perturb, Graph, PerturbationRecord};
use crate::linalg::{frobenius, jacobi, lanczos};
use crate::par::Execution;
use crate::seed;

fn symmetric(n: usize, rng: &mut impl Rng) -> Array2<f64> {
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.sample(StandardNormal);
            m[[i, j]] = x;
            m[[j, i]] = x;
        }
    }
    m
}

fn lanczos_instance(seed: u64) -> Result<f64> {
    let mut rng = seed::rng(seed);
    let n = rng.random_range(2..=64);
    let k = rng.random_range(1..=n.min(8));
    let m = symmetric(n, &mut rng);
    let fast = lanczos::top_k(m.view(), k)?;
    let reference = jacobi::eigh(m.view())?;
    let scale = frobenius(m.view()).max(1.0);
    Ok(fast.values.iter().zip(&reference.values).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max))
}

/// Relative difference, with magnitudes below `1e-5` treated as `1e-5` so
/// that near-zero components are judged by the finite-difference noise floor.
fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-5)
}

fn sgns_loss(w_b: &[f64], w_i: &[f64]) -> f64 {
    let x: f64 = w_b.iter().zip(w_i).map(|(a, b)| a * b).sum();
    // -ln sigma(x), stable for both signs
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

fn ns_gradient_instance(seed: u64) -> f64 {
    let mut rng = seed::rng(seed);
    let dim = rng.random_range(1..=8);
    let w_b: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let w_i: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let analytic = ns_gradient(&w_b, &w_i);
    let h = 1e-6;
    (0..dim)
        .map(|j| {
            let mut up = w_i.clone();
            up[j] += h;
            let mut down = w_i.clone();
            down[j] -= h;
            let fd = (sgns_loss(&w_b, &up) - sgns_loss(&w_b, &down)) / (2.0 * h);
            relative_gap(analytic[j], fd)
        })
        .fold(0.0, f64::max)
}

fn mlp_instance(seed: u64) -> f64 {
    let mut rng = seed::rng(seed);
    let inputs = rng.random_range(2..=6);
    let classes = rng.random_range(2..=4);
    let rows = rng.random_range(3..=8);
    let x = Array2::from_shape_simple_fn((rows, inputs), || rng.sample::<f64, _>(StandardNormal));
    let y: Vec<usize> = (0..rows).map(|_| rng.random_range(0..classes)).collect();
    let model = MlpModel::init(inputs, classes, rng.random());
    let analytic = model.loss_and_grad(x.view(), &y).1.to_vec();
    let base = model.to_vec();
    let h = 1e-6;
    let mut probe = model.clone();
    let mut loss_at = |p: &[f64]| {
        probe.set_from_slice(p);
        probe.loss_and_grad(x.view(), &y).0
    };
    let mut worst = 0.0f64;
    for (k, &a) in analytic.iter().enumerate() {
        let mut p = base.clone();
        p[k] += h;
        let up = loss_at(&p);
        p[k] -= 2.0 * h;
        let down = loss_at(&p);
        worst = worst.max(relative_gap(a, (up - down) / (2.0 * h)));
    }
    worst
}

/// Lanczos against the Jacobi reference on random symmetric matrices, and
/// the analytic Skip-gram and classifier gradients against central
/// differences.
pub(super) fn kernels(n: usize, seed: u64, exec: Execution) -> SuiteReport {
    let mut notes = Vec::new();
    let eig = settle(exec.map(n, |i| lanczos_instance(seed::derive(seed, i as u64))), &mut notes);
    let eig_err: Vec<f64> = eig.iter().map(|r| r.unwrap_or(f64::INFINITY)).collect();
    let ns_err = exec.map(n, |i| ns_gradient_instance(seed::derive(seed ^ 0x5A, i as u64)));
    let mlp_n = n.div_ceil(10);
    let mlp_err = exec.map(mlp_n, |i| mlp_instance(seed::derive(seed ^ 0xA5, i as u64)));
    let within = |errs: &[f64], tol: f64| -> Vec<bool> { errs.iter().map(|&e| e <= tol).collect() };
    let max = |errs: &[f64]| errs.iter().copied().fold(0.0, f64::max);
    let checks = vec![
        Check::all("lanczos_matches_jacobi", &within(&eig_err, 1e-8)).with_error(max(&eig_err)),
        Check::all("ns_gradient_matches_finite_differences", &within(&ns_err, 1e-4)).with_error(max(&ns_err)),
        Check::all("mlp_backprop_matches_finite_differences", &within(&mlp_err, 1e-4)).with_error(max(&mlp_err)),
    ];
    SuiteReport::new(Suite::Kernels, n, seed, checks, notes)
}

struct PerturbCase {
    degrees: bool,
    volume: bool,
    replay: bool,
    count: bool,
}

fn perturb_case(seed: u64) -> Result<PerturbCase> {
    let mut rng = seed::rng(seed);
    let n = rng.random_range(2..=30);
    let p = rng.random_range(0.05..0.7);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            let chance = if u == v { 0.1 } else { p };
            if rng.random::<f64>() < chance {
                edges.push((u, v, rng.random_range(1..=16) as f64 / 4.0));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    let k = rng.random_range(1..=n.min(4));
    let mut labels: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.random_range(0..k) }).collect();
    labels.shuffle(&mut rng);
    let c = ClusterAssignment::from_labels(labels, k)?;
    let pivot = rng.random_range(0..n);
    let alpha = match rng.random_range(0..4) {
        0 => 1.0,
        1 => 0.5,
        _ => 1.0 - rng.random::<f64>(),
    };
    let s: u64 = rng.random();
    let (gp, rec) = perturb(&g, pivot, alpha, &c, s)?;

    let degrees = g.degrees().iter().zip(gp.degrees()).all(|(a, b)| a.to_bits() == b.to_bits());
    let volume = g.volume().to_bits() == gp.volume().to_bits();
    let again = perturb(&g, pivot, alpha, &c, s)?;
    let decoded = PerturbationRecord::from_json(&rec.to_json()?)?;
    let replay = again.0 == gp && again.1 == rec && decoded == rec && decoded.apply(&g)? == gp;
    let candidates = g
        .row(pivot)
        .filter(|&(q, _)| q != pivot && c.cluster_of(q) != c.cluster_of(pivot))
        .count();
    let count = rec.removed_edges.len() == (alpha * candidates as f64 + 0.5).floor() as usize;
    Ok(PerturbCase { degrees, volume, replay, count })
}

/// Random weighted graphs (with self-loops), partitions, pivots, ratios and
/// seeds. Weights are multiples of 1/4, so degree sums are exact and
/// preservation is checked bit for bit.
pub(super) fn perturbation(n: usize, seed: u64, exec: Execution) -> SuiteReport {
    let mut notes = Vec::new();
    let results = settle(exec.map(n, |i| perturb_case(seed::derive(seed, i as u64))), &mut notes);
    let flag = |f: fn(&PerturbCase) -> bool| -> Vec<bool> { results.iter().map(|r| r.as_ref().is_some_and(f)).collect() };
    let checks = vec![
        Check::all("degrees_preserved_exactly", &flag(|r| r.degrees)),
        Check::all("volume_preserved_exactly", &flag(|r| r.volume)),
        Check::all("record_replay_bit_identical", &flag(|r| r.replay)),
        Check::all("removed_count_is_rounded_alpha_share", &flag(|r| r.count)),
    ];
    SuiteReport::new(Suite::Perturbation, n, seed, checks, notes)
}

/// Average ranks by counting: `#{x_j < x_i} + (#{x_j == x_i} + 1) / 2`.
fn counting_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let below = x.iter().filter(|&&xj| xj < xi).count() as f64;
            let equal = x.iter().filter(|&&xj| xj == xi).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn tie_term(x: &[f64]) -> f64 {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .chunk_by(|a, b| a == b)
        .map(|g| {
            let t = g.len() as f64;
            (t * t * t - t) / 12.0
        })
        .sum()
}

/// Tie-corrected closed form `(Sx + Sy - sum d^2) / (2 sqrt(Sx Sy))` with
/// `Sx = (n^3 - n)/12 - sum (t^3 - t)/12` over tie groups.
fn closed_form_spearman(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ra, rb) = (counting_ranks(a), counting_ranks(b));
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
    let base = (n * n * n - n) / 12.0;
    let (sx, sy) = (base - tie_term(a), base - tie_term(b));
    (sx + sy - d2) / (2.0 * (sx * sy).sqrt())
}

fn spearman_instance(seed: u64) -> Result<f64> {
    let mut rng = seed::rng(seed);
    let n = rng.random_range(5..=40);
    let levels = rng.random_range(2..=n);
    loop {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let mut b = a.clone();
        b.shuffle(&mut rng);
        for x in b.iter_mut() {
            if rng.random::<f64>() < 0.3 {
                *x = rng.random_range(0..levels) as f64;
            }
        }
        let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
        if constant(&a) || constant(&b) {
            continue;
        }
        return Ok((spearman_values(&a, &b)? - closed_form_spearman(&a, &b)).abs());
    }
}

/// Brute-force m-NN: sort all other points by (squared distance, id).
fn brute_imp(w: &Array2<f64>, wp: &Array2<f64>, m: usize) -> f64 {
    let n = w.nrows();
    let knn = |p: &Array2<f64>, i: usize| -> Vec<usize> {
        let mut all: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| ((&p.row(i) - &p.row(j)).mapv(|x| x * x).sum(), j))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.into_iter().take(m).map(|x| x.1).collect()
    };
    let mut total = 0.0;
    for i in 0..n {
        let a = knn(w, i);
        let b = knn(wp, i);
        let shared = a.iter().filter(|x| b.contains(x)).count();
        total += 1.0 - shared as f64 / m as f64;
    }
    total / n as f64
}

fn imp_instance(seed: u64) -> Result<bool> {
    let mut rng = seed::rng(seed);
    // small integer grid, so distance ties are common and exercise the tie-break
    let w = Array2::from_shape_simple_fn((10, 2), || rng.random_range(0..4) as f64);
    let mut wp = w.clone();
    for mut row in wp.outer_iter_mut() {
        if rng.random::<f64>() < 0.4 {
            row.mapv_inplace(|x| x + rng.random_range(-1..=1) as f64);
        }
    }
    let m = rng.random_range(1..=9);
    Ok(imp(w.view(), wp.view(), m)? == brute_imp(&w, &wp, m))
}

pub(super) fn metrics(n: usize, seed: u64, exec: Execution) -> SuiteReport {
    let mut notes = Vec::new();
    let sp = settle(exec.map(n, |i| spearman_instance(seed::derive(seed, i as u64))), &mut notes);
    let sp_err: Vec<f64> = sp.iter().map(|r| r.unwrap_or(f64::INFINITY)).collect();
    let imp_n = n.div_ceil(2);
    let im = settle(exec.map(imp_n, |i| imp_instance(seed::derive(seed ^ 0x1F, i as u64))), &mut notes);
    let im_ok: Vec<bool> = im.iter().map(|r| r.unwrap_or(false)).collect();
    let checks = vec![
        Check::all("spearman_matches_closed_form", &sp_err.iter().map(|&e| e <= 1e-12).collect::<Vec<_>>())
            .with_error(sp_err.iter().copied().fold(0.0, f64::max)),
        Check::all("imp_matches_brute_force", &im_ok),
    ];
    SuiteReport::new(Suite::Metrics, n, seed, checks, notes)
}
