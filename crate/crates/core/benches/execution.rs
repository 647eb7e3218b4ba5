use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use grasscond::condmc::line_statistics;
use grasscond::intrinsic::iv_mc_simplicial;
use grasscond::twisted::{mc_avg_twisted, SquareMatrix};
use grasscond::{Execution, Sampling};

const SCHEDULES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn basis(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

fn simplicial(c: &mut Criterion) {
    let mut group = c.benchmark_group("simplicial_faces");
    group.sample_size(10);
    let samples = 200_000;
    group.throughput(Throughput::Elements(samples));
    for n in [3, 8] {
        let gens = basis(n);
        for (name, exec) in SCHEDULES {
            let mc = Sampling::new(samples, 1).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(name, n), &gens, |b, g| b.iter(|| iv_mc_simplicial(black_box(g), &mc).unwrap()));
        }
    }
    group.finish();
}

fn twisted(c: &mut Criterion) {
    let mut group = c.benchmark_group("haar_twisted");
    group.sample_size(10);
    let samples = 50_000;
    group.throughput(Throughput::Elements(samples));
    let a = SquareMatrix::from_fn(5, 5, |i, j| 1.0 / (1 + i + j) as f64);
    for (name, exec) in SCHEDULES {
        let mc = Sampling::new(samples, 2).with_execution(exec);
        group.bench_function(name, |b| b.iter(|| mc_avg_twisted(black_box(&a), 2, 0.5, &mc).unwrap()));
    }
    group.finish();
}

fn condition(c: &mut Criterion) {
    let mut group = c.benchmark_group("line_condition");
    group.sample_size(10);
    let samples = 1_000_000;
    group.throughput(Throughput::Elements(samples));
    for (name, exec) in SCHEDULES {
        let mc = Sampling::new(samples, 3).with_execution(exec);
        group.bench_function(name, |b| b.iter(|| line_statistics(6, 0.5, black_box(&[10.0, 100.0]), &mc).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, simplicial, twisted, condition);
criterion_main!(benches);
