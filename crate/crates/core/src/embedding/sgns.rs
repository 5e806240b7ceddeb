use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::Array2;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{generate_walks, sigmoid, EmbeddingMatrix, TrainConfig, WalkCorpus, DIVERGENCE_LIMIT};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

const INIT_SALT: u64 = 0x696E_6974;
const SHUFFLE_SALT: u64 = 0x7368_7566;
const NEG_SALT: u64 = 0x6E65_6773;

/// A flat `rows x dim` parameter table that can be read and written through a
/// shared reference: `Cell`s for the single-threaded path, relaxed atomics for
/// hogwild training.
pub(super) trait Table {
    fn get(&self, i: usize) -> f64;
    fn set(&self, i: usize, x: f64);
}

impl Table for [Cell<f64>] {
    fn get(&self, i: usize) -> f64 {
        self[i].get()
    }
    fn set(&self, i: usize, x: f64) {
        self[i].set(x)
    }
}

impl Table for [AtomicU64] {
    fn get(&self, i: usize) -> f64 {
        f64::from_bits(self[i].load(Ordering::Relaxed))
    }
    fn set(&self, i: usize, x: f64) {
        self[i].store(x.to_bits(), Ordering::Relaxed)
    }
}

/// One negative-sampling update of `center` against `positive` and `negs`.
/// Context rows move immediately; the accumulated target step is applied last,
/// as in word2vec. `target` and `context` may be the same table.
#[allow(clippy::too_many_arguments)]
pub(super) fn update<T: Table + ?Sized>(
    target: &T,
    context: &T,
    dim: usize,
    center: usize,
    positive: usize,
    negs: &[usize],
    lr: f64,
    err: &mut [f64],
) {
    err.iter_mut().for_each(|e| *e = 0.0);
    let c0 = center * dim;
    for (o, label) in std::iter::once((positive, 1.0)).chain(negs.iter().map(|&n| (n, 0.0))) {
        let o0 = o * dim;
        let mut dot = 0.0;
        for d in 0..dim {
            dot += target.get(c0 + d) * context.get(o0 + d);
        }
        let g = lr * (label - sigmoid(dot));
        for (d, e) in err.iter_mut().enumerate() {
            let t = target.get(c0 + d);
            let c = context.get(o0 + d);
            *e += g * c;
            context.set(o0 + d, c + g * t);
        }
    }
    for (d, e) in err.iter().enumerate() {
        target.set(c0 + d, target.get(c0 + d) + e);
    }
}

/// Learning rate after `done` of `total` updates: linear decay to `1e-4 * lr0`.
pub(super) fn decayed(lr0: f64, done: usize, total: usize) -> f64 {
    let frac = if total == 0 { 0.0 } else { done as f64 / total as f64 };
    lr0 * (1.0 - frac).max(1e-4)
}

pub(super) fn init(rows: usize, cfg: &TrainConfig) -> EmbeddingMatrix {
    EmbeddingMatrix::init(rows, cfg.dim, seed::derive(cfg.seed, INIT_SALT))
}

pub(super) fn check_divergence(e: &EmbeddingMatrix, epoch: usize) -> Result<()> {
    if !e.is_finite() || e.max_abs() > DIVERGENCE_LIMIT {
        return Err(Error::Diverged { epoch, limit: DIVERGENCE_LIMIT });
    }
    Ok(())
}

pub(super) fn as_cells(a: &mut Array2<f64>) -> &[Cell<f64>] {
    let s = a.as_slice_mut().expect("standard layout");
    Cell::from_mut(s).as_slice_of_cells()
}

pub(super) fn to_atomics(a: &Array2<f64>) -> Vec<AtomicU64> {
    a.iter().map(|x| AtomicU64::new(x.to_bits())).collect()
}

pub(super) fn from_atomics(t: &[AtomicU64], shape: (usize, usize)) -> Array2<f64> {
    let v = t.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect();
    Array2::from_shape_vec(shape, v).expect("shape matches")
}

/// Split `0..len` into contiguous chunks and run `f(chunk_index, range)` on
/// each, in parallel when the feature is enabled.
pub(super) fn hogwild<F>(len: usize, f: F)
where
    F: Fn(usize, std::ops::Range<usize>) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let chunk = len.div_ceil(4 * rayon::current_num_threads()).max(1);
        (0..len.div_ceil(chunk))
            .into_par_iter()
            .for_each(|i| f(i, i * chunk..((i + 1) * chunk).min(len)));
    }
    #[cfg(not(feature = "parallel"))]
    f(0, 0..len);
}

fn pairs_in(walk: &[usize], window: usize) -> usize {
    (0..walk.len()).map(|i| i.min(window) + (walk.len() - 1 - i).min(window)).sum()
}

struct Pass<'a> {
    corpus: &'a WalkCorpus,
    noise: &'a WeightedIndex<f64>,
    cfg: &'a TrainConfig,
    total: usize,
}

impl Pass<'_> {
    fn run<T: Table + ?Sized>(&self, target: &T, context: &T, walks: &[usize], mut done: usize, rng: &mut impl Rng) {
        let cfg = self.cfg;
        let mut err = vec![0.0; cfg.dim];
        let mut negs = Vec::with_capacity(cfg.negatives);
        for &wi in walks {
            let walk = &self.corpus.walks[wi];
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window).min(walk.len() - 1);
                for (j, &ctx) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    negs.clear();
                    for _ in 0..cfg.negatives {
                        let s = self.noise.sample(rng);
                        if s != ctx {
                            negs.push(s);
                        }
                    }
                    let lr = decayed(cfg.learning_rate, done, self.total);
                    update(target, context, cfg.dim, center, ctx, &negs, lr, &mut err);
                    done += 1;
                }
            }
        }
    }
}

/// DeepWalk: SGNS over `(center, context)` pairs within `window` positions of
/// each other in random walks.
///
/// Negatives follow the walk-corpus unigram distribution raised to 3/4; a
/// negative equal to the positive context is skipped. Every epoch revisits
/// the same corpus in a freshly shuffled walk order.
pub fn train_deepwalk(g: &Graph, cfg: &TrainConfig) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    let n = g.num_nodes();
    let mut emb = init(n, cfg);
    if n == 0 {
        return Ok(emb);
    }
    let corpus = generate_walks(g, cfg);
    let weights: Vec<f64> = corpus.counts(n).iter().map(|&c| (c as f64).powf(0.75)).collect();
    let noise = WeightedIndex::new(&weights).map_err(|e| Error::Numerical(e.to_string()))?;
    let per_walk: Vec<usize> = corpus.walks.iter().map(|w| pairs_in(w, cfg.window)).collect();
    let per_epoch: usize = per_walk.iter().sum();
    let total = per_epoch * cfg.epochs;
    if total == 0 {
        return Ok(emb);
    }
    let pass = Pass { corpus: &corpus, noise: &noise, cfg, total };

    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..corpus.len()).collect();
        order.shuffle(&mut seed::stream(seed::derive(cfg.seed, SHUFFLE_SALT), epoch as u64));
        let done = epoch * per_epoch;
        let neg_seed = seed::derive(seed::derive(cfg.seed, NEG_SALT), epoch as u64);
        if cfg.parallel && cfg!(feature = "parallel") {
            let t = to_atomics(&emb.target);
            let c = to_atomics(&emb.context);
            hogwild(order.len(), |chunk, range| {
                let before: usize = order[..range.start].iter().map(|&w| per_walk[w]).sum();
                let mut rng = seed::stream(neg_seed, chunk as u64);
                pass.run(&t[..], &c[..], &order[range], done + before, &mut rng);
            });
            emb.target = from_atomics(&t, emb.target.dim());
            emb.context = from_atomics(&c, emb.context.dim());
        } else {
            let mut rng = seed::rng(neg_seed);
            let (mut target, mut context) = (emb.target.clone(), emb.context.clone());
            pass.run(as_cells(&mut target), as_cells(&mut context), &order, done, &mut rng);
            emb.target = target;
            emb.context = context;
        }
        check_divergence(&emb, epoch)?;
    }
    Ok(emb)
}
