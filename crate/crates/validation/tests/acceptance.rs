//! Acceptance run: ten criteria, one PASS/FAIL line each, nonzero exit if any
//! fails. Every reference value is computed by `bridgeness_validation`, not by
//! the crate under test.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bridgeness::embedding::{ns_gradient, train_deepwalk};
use bridgeness::eval::{spearman_values, MlpModel};
use bridgeness::explain::{graph_gd, graph_gd_scores, graph_wgd, graph_wgd_scores, imp, imp_hat, imp_hat_edge_weighted};
use bridgeness::graph::{gnm, karate, perturb, Graph, PerturbationRecord};
use bridgeness::linalg::lanczos;
use bridgeness::seed::{derive, rng};
use bridgeness::spectral::{spectral_clustering_embedding, spectral_embedding};
use bridgeness::verify::construct::{bridge_instance, Contrast};
use bridgeness::verify::{random_partitioned_graph, two_block_instance};
use bridgeness::{ClusterAssignment, EmbeddingMatrix, Execution, TrainConfig, WeightVariant};
use bridgeness_validation as oracle;
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<(bool, String), String>;

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const PSI: usize = 100;
const KARATE_TOP: [usize; 5] = [0, 2, 33, 18, 20];

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

struct KarateRun {
    embedding: EmbeddingMatrix,
    clusters: ClusterAssignment,
    seed: u64,
}

fn karate_run(g: &Graph, seed: u64) -> Result<KarateRun, String> {
    let cfg = TrainConfig { seed, ..TrainConfig::default() };
    let embedding = train_deepwalk(g, &cfg).map_err(err)?;
    let clusters = spectral_clustering_embedding(embedding.target().view(), 2, seed).map_err(err)?;
    Ok(KarateRun { embedding, clusters, seed })
}

fn wgd_scores(g: &Graph, r: &KarateRun, variant: WeightVariant) -> Result<Vec<f64>, String> {
    Ok(graph_wgd_scores(g, &r.embedding, PSI, variant, r.seed, Execution::Parallel).map_err(err)?.scores().to_vec())
}

fn criterion_1() -> Outcome {
    let g = karate();
    let (mut gd, mut wgd) = (Vec::new(), Vec::new());
    for s in SEEDS {
        let r = karate_run(&g, s)?;
        let b = oracle::bridgeness_all(&g, r.clusters.assignment());
        let gd_s = graph_gd_scores(&g, &r.embedding, PSI, s, Execution::Parallel).map_err(err)?;
        gd.push(oracle::spearman(gd_s.scores(), &b));
        wgd.push(oracle::spearman(&wgd_scores(&g, &r, WeightVariant::Base)?, &b));
    }
    let (mg, mw) = (mean(&gd), mean(&wgd));
    Ok((mw >= 0.45 && mw > mg, format!("mean Spearman wGD {mw:.3} (need >= 0.45), GD {mg:.3} (need wGD > GD)")))
}

fn criterion_2() -> Outcome {
    let g = karate();
    let mut hits = Vec::new();
    for s in SEEDS {
        let r = karate_run(&g, s)?;
        let scores = wgd_scores(&g, &r, WeightVariant::Base)?;
        // ranking oracle: descending score, ascending id
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        hits.push(order[..5].iter().filter(|v| KARATE_TOP.contains(v)).count());
    }
    let good = hits.iter().filter(|&&h| h >= 3).count();
    Ok((good * 2 > SEEDS.len(), format!("top-5 hits per seed {hits:?}; {good}/5 seeds with >= 3 (need a majority)")))
}

fn argmax_set(x: &[f64], rel: f64) -> Vec<usize> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = rel * m.abs().max(1.0);
    (0..x.len()).filter(|&i| x[i] >= m - tol).collect()
}

fn criterion_3() -> Outcome {
    let mut argmax_ok = 0;
    let mut identity_ok = 0;
    let (mut worst, mut worst_weighted, mut argmax_weighted) = (0.0f64, 0.0f64, 0);
    let seed = 31;
    for i in 0..20 {
        let s = derive(seed, i);
        let (g, c) = two_block_instance(s).map_err(err)?;
        let n = g.num_nodes();
        let base = spectral_embedding(&g, 2).map_err(err)?;
        let relaxed = oracle::relaxed_n_asso(&g, 2);
        let (mut lit, mut wtd) = (vec![0.0; n], vec![0.0; n]);
        let mut inst_err = 0.0f64;
        for v in 0..n {
            let (gp, _) = perturb(&g, v, 1.0, &c, derive(s, v as u64)).map_err(err)?;
            let pert = spectral_embedding(&gp, 2).map_err(err)?;
            let target = 2.0 * (oracle::relaxed_n_asso(&gp, 2) - relaxed).abs();
            lit[v] = imp_hat(&g, base.vectors.view(), &gp, pert.vectors.view()).map_err(err)?;
            wtd[v] = imp_hat_edge_weighted(&g, base.vectors.view(), &gp, pert.vectors.view()).map_err(err)?;
            inst_err = inst_err.max((lit[v] - target).abs() / target.max(1.0));
            worst_weighted = worst_weighted.max((wtd[v] - target).abs() / target.max(1.0));
        }
        worst = worst.max(inst_err);
        identity_ok += usize::from(inst_err <= 1e-8);
        let best = argmax_set(&oracle::bridgeness_all(&g, c.assignment()), 0.0);
        argmax_ok += usize::from(argmax_set(&lit, 1e-9).iter().any(|v| best.contains(v)));
        argmax_weighted += usize::from(argmax_set(&wtd, 1e-9).iter().any(|v| best.contains(v)));
    }
    println!(
        "    note: edge-weighted Imp-hat: argmax {argmax_weighted}/20, identity max error {worst_weighted:.1e}"
    );
    Ok((
        argmax_ok >= 19 && identity_ok == 20,
        format!(
            "argmax Imp-hat = max bridgeness {argmax_ok}/20 (need 19); Imp-hat = 2|dN_asso| to 1e-8 {identity_ok}/20 (max error {worst:.2e})"
        ),
    ))
}

fn criterion_4() -> Outcome {
    let mut mono = 0;
    for i in 0..50 {
        let s = derive(41, i);
        let (g, c) = random_partitioned_graph(s).map_err(err)?;
        let before = oracle::n_asso_per_cluster(&g, c.assignment(), c.k());
        let mut ok = true;
        for v in 0..g.num_nodes() {
            let (gp, _) = perturb(&g, v, 1.0, &c, derive(s, v as u64)).map_err(err)?;
            let after = oracle::n_asso_per_cluster(&gp, c.assignment(), c.k());
            ok &= after.iter().zip(&before).all(|(a, b)| a >= b);
        }
        mono += usize::from(ok);
    }
    let mut argmax = 0;
    for i in 0..20 {
        let s = derive(42, i);
        let (g, c) = two_block_instance(s).map_err(err)?;
        let base = oracle::n_asso(&g, c.assignment(), 2);
        let mut delta = Vec::new();
        for v in 0..g.num_nodes() {
            let (gp, _) = perturb(&g, v, 1.0, &c, derive(s, v as u64)).map_err(err)?;
            delta.push(oracle::n_asso(&gp, c.assignment(), 2) - base);
        }
        let best = argmax_set(&oracle::bridgeness_all(&g, c.assignment()), 0.0);
        argmax += usize::from(argmax_set(&delta, 1e-12).iter().any(|v| best.contains(v)));
    }
    Ok((
        mono == 50 && argmax >= 19,
        format!("N_asso non-decreasing on {mono}/50 graphs (need 50); argmax dN_asso = max bridgeness {argmax}/20 (need 19)"),
    ))
}

fn criterion_5() -> Outcome {
    let full = usize::MAX;
    let mut lemma2 = 0;
    for i in 0..50 {
        let inst = bridge_instance(derive(51, i), Contrast::FewerInterEdges).map_err(err)?;
        let (g, e) = (&inst.graph, &inst.embedding);
        let good = oracle::is_good_embedding(e.target(), inst.clusters.assignment());
        let gd_b = graph_gd(g, e, inst.v_b, full, 0);
        let gd_c = graph_gd(g, e, inst.v_c, full, 0);
        let agrees = (gd_b - oracle::gradient_score(g, e, inst.v_b, false)).abs() <= 1e-12
            && (gd_c - oracle::gradient_score(g, e, inst.v_c, false)).abs() <= 1e-12;
        lemma2 += usize::from(good && agrees && g.degree(inst.v_b) == g.degree(inst.v_c) && gd_b > gd_c);
    }
    let (mut above, mut equal, mut chain) = (0, 0, 0);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let inst = bridge_instance(derive(52, i), Contrast::NoSupport).map_err(err)?;
        let (g, e) = (&inst.graph, &inst.embedding);
        let good = oracle::is_good_embedding(e.target(), inst.clusters.assignment());
        let gd_b = graph_gd(g, e, inst.v_b, full, 0);
        let wgd_b = graph_wgd(g, e, inst.v_b, full, WeightVariant::Base, 0);
        let gd_c = graph_gd(g, e, inst.v_c, full, 0);
        let wgd_c = graph_wgd(g, e, inst.v_c, full, WeightVariant::Base, 0);
        let oracle_ok = (wgd_b - oracle::gradient_score(g, e, inst.v_b, true)).abs() <= 1e-12;
        worst = worst.max((wgd_c - gd_c).abs());
        above += usize::from(good && oracle_ok && wgd_b > gd_b);
        equal += usize::from(good && (wgd_c - gd_c).abs() <= 1e-12);
        chain += usize::from(gd_b > gd_c);
    }
    Ok((
        lemma2 == 50 && above == 50 && equal == 50,
        format!(
            "GD(v_b) > GD(v_c) {lemma2}/50; wGD(v_b) > GD(v_b) {above}/50; wGD(v_c) = GD(v_c) {equal}/50 (max gap {worst:.1e}); full chain {chain}/50"
        ),
    ))
}

fn criterion_6() -> Outcome {
    let mut r = rng(61);
    let mut eig_ok = 0;
    let mut worst_eig = 0.0f64;
    for _ in 0..200 {
        let n = r.random_range(2..=64);
        let k = r.random_range(1..=n.min(8));
        let mut m = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let x: f64 = r.sample(StandardNormal);
                m[[i, j]] = x;
                m[[j, i]] = x;
            }
        }
        let fast = lanczos::top_k(m.view(), k).map_err(err)?;
        let reference = oracle::eigenvalues(&m);
        let e = fast.values.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_eig = worst_eig.max(e);
        eig_ok += usize::from(e <= 1e-8);
    }

    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-5);
    let h = 1e-6;
    let mut worst_ns = 0.0f64;
    for _ in 0..200 {
        let dim = r.random_range(1..=8);
        let wb: Vec<f64> = (0..dim).map(|_| r.sample(StandardNormal)).collect();
        let wi: Vec<f64> = (0..dim).map(|_| r.sample(StandardNormal)).collect();
        let loss = |w: &[f64]| -> f64 {
            let x: f64 = wb.iter().zip(w).map(|(a, b)| a * b).sum();
            (1.0 + (-x).exp()).ln()
        };
        let g = ns_gradient(&wb, &wi);
        for j in 0..dim {
            let (mut up, mut down) = (wi.clone(), wi.clone());
            up[j] += h;
            down[j] -= h;
            worst_ns = worst_ns.max(rel(g[j], (loss(&up) - loss(&down)) / (2.0 * h)));
        }
    }

    let mut worst_mlp = 0.0f64;
    for _ in 0..20 {
        let (inputs, classes, rows) = (r.random_range(2..=6), r.random_range(2..=4), r.random_range(3..=8));
        let x = Array2::from_shape_simple_fn((rows, inputs), || r.sample::<f64, _>(StandardNormal));
        let y: Vec<usize> = (0..rows).map(|_| r.random_range(0..classes)).collect();
        let model = MlpModel::init(inputs, classes, r.random());
        let grad = model.loss_and_grad(x.view(), &y).1.to_vec();
        let base = model.to_vec();
        for (k, &a) in grad.iter().enumerate() {
            let loss_at = |delta: f64| {
                let mut p = base.clone();
                p[k] += delta;
                let mut m = model.clone();
                m.set_from_slice(&p);
                oracle::mlp_loss(&m.w1, m.b1.as_slice().unwrap(), &m.w2, m.b2.as_slice().unwrap(), &x, &y)
            };
            let fd = (loss_at(h) - loss_at(-h)) / (2.0 * h);
            worst_mlp = worst_mlp.max(rel(a, fd));
        }
    }
    Ok((
        eig_ok == 200 && worst_ns <= 1e-4 && worst_mlp <= 1e-4,
        format!(
            "Lanczos vs Jacobi {eig_ok}/200 within 1e-8 (max {worst_eig:.1e}); ns_gradient FD max rel {worst_ns:.1e}; MLP FD max rel {worst_mlp:.1e}"
        ),
    ))
}

fn criterion_7() -> Outcome {
    let mut r = rng(71);
    let (mut preserved, mut replayed) = (0, 0);
    for _ in 0..1000 {
        let n = r.random_range(2..=30);
        let p = r.random_range(0.05..0.7);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u..n {
                if r.random::<f64>() < if u == v { 0.1 } else { p } {
                    edges.push((u, v, r.random_range(1..=16) as f64 / 4.0));
                }
            }
        }
        let g = Graph::from_edges(n, edges).map_err(err)?;
        let k = r.random_range(1..=n.min(4));
        let mut labels: Vec<usize> = (0..n).map(|v| if v < k { v } else { r.random_range(0..k) }).collect();
        labels.shuffle(&mut r);
        let c = ClusterAssignment::from_labels(labels, k).map_err(err)?;
        let pivot = r.random_range(0..n);
        let alpha = 1.0 - r.random::<f64>();
        let s: u64 = r.random();
        let (gp, rec) = perturb(&g, pivot, alpha, &c, s).map_err(err)?;
        let (d0, d1) = (oracle::degrees(&g), oracle::degrees(&gp));
        let same_degrees = d0 == d1 && gp.degrees() == g.degrees();
        let same_volume = d0.iter().sum::<f64>() == d1.iter().sum::<f64>() && g.volume() == gp.volume();
        preserved += usize::from(same_degrees && same_volume);
        let decoded = PerturbationRecord::from_json(&rec.to_json().map_err(err)?).map_err(err)?;
        let replay = decoded.apply(&g).map_err(err)?;
        let again = perturb(&g, pivot, alpha, &c, s).map_err(err)?;
        replayed += usize::from(decoded == rec && replay == gp && again.0 == gp && again.1 == rec);
    }
    Ok((
        preserved == 1000 && replayed == 1000,
        format!("degrees and volume exact {preserved}/1000; replay bit-identical {replayed}/1000"),
    ))
}

fn criterion_8() -> Outcome {
    let mut r = rng(81);
    let mut spearman_ok = 0;
    let mut worst = 0.0f64;
    while spearman_ok < 100 {
        let n = r.random_range(5..=40);
        let levels = r.random_range(2..=n);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(0..levels) as f64).collect();
        let mut b = a.clone();
        b.shuffle(&mut r);
        if a.iter().all(|&x| x == a[0]) {
            continue;
        }
        let e = (spearman_values(&a, &b).map_err(err)? - oracle::spearman(&a, &b)).abs();
        worst = worst.max(e);
        if e > 1e-12 {
            return Ok((false, format!("Spearman differs from closed form by {e:.2e}")));
        }
        spearman_ok += 1;
    }
    let mut imp_ok = 0;
    for _ in 0..50 {
        let w = Array2::from_shape_simple_fn((10, 2), || r.random_range(0..4) as f64);
        let mut wp = w.clone();
        for mut row in wp.outer_iter_mut() {
            if r.random::<f64>() < 0.4 {
                row.mapv_inplace(|x| x + r.random_range(-1..=1) as f64);
            }
        }
        let m = r.random_range(1..=9);
        imp_ok += usize::from(imp(w.view(), wp.view(), m).map_err(err)? == oracle::imp(&w, &wp, m));
    }
    Ok((
        spearman_ok == 100 && imp_ok == 50,
        format!("Spearman = closed form on {spearman_ok}/100 (max error {worst:.1e}); Imp = brute force on {imp_ok}/50"),
    ))
}

fn criterion_9() -> Outcome {
    let g = karate();
    let variants = WeightVariant::all();
    let mut sums = vec![0.0; variants.len()];
    for s in SEEDS {
        let run = karate_run(&g, s)?;
        let b = oracle::bridgeness_all(&g, run.clusters.assignment());
        for (i, &v) in variants.iter().enumerate() {
            sums[i] += oracle::spearman(&wgd_scores(&g, &run, v)?, &b) / SEEDS.len() as f64;
        }
    }
    let base = sums[0];
    let best_other = sums[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let detail: Vec<String> = variants.iter().zip(&sums).map(|(v, s)| format!("{v} {s:.3}")).collect();
    Ok((base >= best_other - 0.05, format!("mean Spearman {}; base must be >= best other - 0.05", detail.join(", "))))
}

fn criterion_10() -> Outcome {
    let sizes = [1000usize, 2000, 4000];
    let mut times = Vec::new();
    for &n in &sizes {
        let g = gnm(n, 5 * n, 101).map_err(err)?;
        let emb = EmbeddingMatrix::init(n, 8, 7);
        let before = emb.clone();
        let mut runs = Vec::new();
        for _ in 0..7 {
            let t = Instant::now();
            let s = graph_wgd_scores(&g, &emb, PSI, WeightVariant::Base, 1, Execution::Sequential).map_err(err)?;
            runs.push(t.elapsed().as_secs_f64());
            std::hint::black_box(s);
        }
        if emb != before {
            return Ok((false, "scoring modified the embedding".into()));
        }
        times.push(oracle::median(runs));
    }
    let ok = (1..sizes.len()).all(|i| times[i] <= 3.0 * (sizes[i] as f64 / 1000.0) * times[0]);
    let ms: Vec<String> = times.iter().map(|t| format!("{:.2} ms", t * 1e3)).collect();
    Ok((ok, format!("median scoring time at 1k/2k/4k nodes: {} (limit 3x linear); embedding untouched", ms.join(" / "))))
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Karate rank correlation", criterion_1, 60),
        ("Karate top-5 overlap", criterion_2, 30),
        ("Imp-hat argmax and identity on SBMs", criterion_3, 60),
        ("N_asso monotonicity and argmax", criterion_4, 60),
        ("GD/wGD ordering on planted embeddings", criterion_5, 30),
        ("numerical kernels", criterion_6, 120),
        ("perturbation invariants", criterion_7, 30),
        ("metric oracles", criterion_8, 30),
        ("ablation ordering", criterion_9, 120),
        ("complexity smoke test", criterion_10, 120),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok((ok, d)) => (ok && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.2}s of {budget}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
