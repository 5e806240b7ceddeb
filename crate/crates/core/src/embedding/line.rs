use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::sgns::{as_cells, check_divergence, decayed, from_atomics, hogwild, init, to_atomics, update, Table};
use super::{EmbeddingMatrix, TrainConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

const EDGE_SALT: u64 = 0x6C69_6E65;

struct Sampler {
    arcs: Vec<(usize, usize)>,
    arc_dist: WeightedIndex<f64>,
    noise: WeightedIndex<f64>,
}

impl Sampler {
    fn run<T: Table + ?Sized>(&self, table: &T, cfg: &TrainConfig, steps: std::ops::Range<usize>, total: usize, rng: &mut impl Rng) {
        let mut err = vec![0.0; cfg.dim];
        let mut negs = Vec::with_capacity(cfg.negatives);
        for step in steps {
            let (u, v) = self.arcs[self.arc_dist.sample(rng)];
            negs.clear();
            for _ in 0..cfg.negatives {
                let s = self.noise.sample(rng);
                if s != u && s != v {
                    negs.push(s);
                }
            }
            let lr = decayed(cfg.learning_rate, step, total);
            update(table, table, cfg.dim, u, v, &negs, lr, &mut err);
        }
    }
}

/// First-order LINE: SGNS on `sigma(w_u . w_v)` for edges sampled in
/// proportion to their weight, `2 |E|` samples per epoch.
///
/// Both endpoints live in the target table (the context table stays zero).
/// Negatives follow degree^(3/4) and never equal either endpoint. Self-loops
/// are not sampled. `walk_length`, `walks_per_node` and `window` are unused.
pub fn train_line(g: &Graph, cfg: &TrainConfig) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    let n = g.num_nodes();
    let mut emb = init(n, cfg);
    let mut arcs = Vec::new();
    let mut arc_w = Vec::new();
    for (u, v, w) in g.edges() {
        if u != v && w > 0.0 {
            arcs.push((u, v));
            arcs.push((v, u));
            arc_w.push(w);
            arc_w.push(w);
        }
    }
    if arcs.is_empty() {
        return Ok(emb);
    }
    let bad = |e: rand::distr::weighted::Error| Error::Numerical(e.to_string());
    let noise_w: Vec<f64> = g.degrees().iter().map(|d| d.powf(0.75)).collect();
    let sampler = Sampler {
        arc_dist: WeightedIndex::new(&arc_w).map_err(bad)?,
        noise: WeightedIndex::new(&noise_w).map_err(bad)?,
        arcs,
    };
    let per_epoch = sampler.arcs.len();
    let total = per_epoch * cfg.epochs;

    for epoch in 0..cfg.epochs {
        let start = epoch * per_epoch;
        let epoch_seed = seed::derive(seed::derive(cfg.seed, EDGE_SALT), epoch as u64);
        if cfg.parallel && cfg!(feature = "parallel") {
            let t = to_atomics(&emb.target);
            hogwild(per_epoch, |chunk, range| {
                let mut rng = seed::stream(epoch_seed, chunk as u64);
                sampler.run(&t[..], cfg, start + range.start..start + range.end, total, &mut rng);
            });
            emb.target = from_atomics(&t, emb.target.dim());
        } else {
            let mut rng = seed::rng(epoch_seed);
            let mut target = emb.target.clone();
            sampler.run(as_cells(&mut target), cfg, start..start + per_epoch, total, &mut rng);
            emb.target = target;
        }
        check_divergence(&emb, epoch)?;
    }
    Ok(emb)
}
