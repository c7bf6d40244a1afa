//! Sequential vs parallel execution of the data-parallel stages.
//!
//! Without the `parallel` feature both modes run sequentially, which makes this a
//! convenient overhead check for the fallback path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use xmodal::boc::{encode_pack, Aggregation, BocConfig};
use xmodal::codebook::{build_pool, kmeans, KmeansParams};
use xmodal::eval::{run_retrieval, Experiment, MethodSpec, Task};
use xmodal::features::{generate_synthetic, FeaturePack, SyntheticConfig};
use xmodal::index::build_index;
use xmodal::transform::{transform_pack, GlobalMethod, TransformConfig};
use xmodal::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn packs() -> (FeaturePack, FeaturePack) {
    generate_synthetic(&SyntheticConfig::new(300, 64, 30, 1.0, 11)).unwrap()
}

fn transforms(c: &mut Criterion) {
    let (images, sentences) = packs();
    let sq = TransformConfig::with_sparsity(GlobalMethod::ScalarQuantization { scale: 1000.0 }, 64, 0.0, true).unwrap();
    let pool = build_pool(&[&images, &sentences], 5000, false, 1).unwrap();
    let cb = kmeans(
        &pool,
        128,
        &KmeansParams {
            seed: 1,
            max_iters: 10,
            ..KmeansParams::default()
        },
    )
    .unwrap();
    let soft = BocConfig::soft(Aggregation::Sum, 16);

    let mut g = c.benchmark_group("encode");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("scalar_quantization", name), &exec, |b, &exec| {
            b.iter(|| transform_pack(black_box(&sentences), &sq, exec).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("boc_soft", name), &exec, |b, &exec| {
            b.iter(|| encode_pack(black_box(&sentences), &cb, &soft, exec).unwrap())
        });
    }
    g.finish();
}

fn clustering(c: &mut Criterion) {
    let (images, sentences) = packs();
    let pool = build_pool(&[&images, &sentences], 4000, true, 2).unwrap();
    let mut g = c.benchmark_group("kmeans");
    g.sample_size(10);
    for (name, exec) in MODES {
        let params = KmeansParams {
            seed: 3,
            max_iters: 5,
            exec,
            ..KmeansParams::default()
        };
        g.bench_function(BenchmarkId::new("p64_5iters", name), |b| {
            b.iter(|| kmeans(black_box(&pool), 64, &params).unwrap())
        });
    }
    g.finish();
}

fn retrieval(c: &mut Criterion) {
    let (images, sentences) = packs();
    let cfg = TransformConfig::with_sparsity(GlobalMethod::DeepPermutation, 64, 0.5, true).unwrap();
    let corpus = transform_pack(&images, &cfg, Exec::default()).unwrap();
    let queries = transform_pack(&sentences, &cfg, Exec::default()).unwrap();
    let index = build_index(&corpus).unwrap();

    let mut g = c.benchmark_group("retrieval");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("inverted_top10", name), &exec, |b, &exec| {
            b.iter(|| run_retrieval(&index, black_box(&queries.vectors), 10, exec).unwrap())
        });
        let exp = Experiment::new(&images, &sentences, MethodSpec::deep_permutation(), None)
            .unwrap()
            .with_exec(exec);
        g.bench_function(BenchmarkId::new("exact_top10", name), |b| {
            b.iter(|| exp.exact_rankings(Task::ImageRetrieval, 10).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, transforms, clustering, retrieval);
criterion_main!(benches);
