use std::hint::black_box;

use bridgeness::embedding::generate_walks_with;
use bridgeness::explain::graph_wgd_scores;
use bridgeness::graph::gnm;
use bridgeness::spectral::{kmeans_with, KMeansOptions};
use bridgeness::{EmbeddingMatrix, Execution, TrainConfig, WeightVariant};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn scoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("wgd_scores");
    for n in [1_000usize, 4_000] {
        let g = gnm(n, 5 * n, 1).unwrap();
        let emb = EmbeddingMatrix::init(n, 32, 2);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| graph_wgd_scores(&g, &emb, 100, WeightVariant::Base, 3, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("kmeans");
    group.sample_size(20);
    let emb = EmbeddingMatrix::init(4_000, 32, 5);
    for (name, exec) in MODES {
        let opts = KMeansOptions { execution: exec, ..KMeansOptions::default() };
        group.bench_function(name, |b| b.iter(|| kmeans_with(black_box(emb.target().view()), 8, 7, opts).unwrap()));
    }
    group.finish();
}

fn walks(c: &mut Criterion) {
    let mut group = c.benchmark_group("walks");
    let g = gnm(4_000, 20_000, 9).unwrap();
    let cfg = TrainConfig { walk_length: 40, ..TrainConfig::default() };
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| generate_walks_with(&g, &cfg, exec)));
    }
    group.finish();
}

criterion_group!(benches, scoring, clustering, walks);
criterion_main!(benches);
