use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fermenc::distance::{min_distance, DistanceBudget};
use fermenc::exec;
use fermenc::search::{brute_force_search, SearchConfig};
use fermenc::{EdgeSet, EncodingCandidate, Scheme, UnitCellLayout};

fn square(cv: usize, ch: usize) -> SearchConfig {
    let mut cfg = SearchConfig::new(UnitCellLayout::new(2, Scheme::TwoGrids, EdgeSet::NNSquare).unwrap());
    cfg.max_vertex_weight = cv;
    cfg.max_edge_or_hopping_weight = ch;
    cfg
}

/// A distance-3 encoding, so the search has to exhaust weights 1 and 2.
fn distance_three() -> EncodingCandidate {
    let mut cfg = square(3, 4);
    cfg.min_distance_filter = 3;
    let out = brute_force_search(&cfg, &mut |_| {}).unwrap();
    out.front.into_iter().next().expect("a d=3 encoding").encoding
}

fn worker_counts() -> Vec<usize> {
    let n = std::thread::available_parallelism().map_or(1, |n| n.get());
    if exec::PARALLEL {
        vec![1, n.max(2)]
    } else {
        vec![1]
    }
}

fn bench_distance(c: &mut Criterion) {
    let enc = distance_three();
    let mut g = c.benchmark_group("min_distance_d3");
    for w in worker_counts() {
        let budget = DistanceBudget::new(4).with_workers(w);
        g.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, &w| {
            b.iter(|| exec::with_threads(w, || min_distance(&enc, &budget).unwrap()))
        });
    }
    g.finish();
}

fn bench_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("brute_force_3_3");
    g.sample_size(10);
    for w in worker_counts() {
        let mut cfg = square(3, 3);
        cfg.threads = w;
        g.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, _| {
            b.iter(|| brute_force_search(&cfg, &mut |_| {}).unwrap().report)
        });
    }
    g.finish();
}

criterion_group!(benches, bench_distance, bench_search);
criterion_main!(benches);
