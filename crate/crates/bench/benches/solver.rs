use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use poisson_bench::{channel_plan, periodic_plan, random_field};
use poisson_core::Field;

fn periodic_2d(c: &mut Criterion) {
    let mut group = c.benchmark_group("periodic-spectral-2d");
    for n in [64, 128, 256, 512] {
        let plan = periodic_plan(n, 2);
        let rhs = random_field(&[n, n], 7);
        let mut out = Field::zeros(&[n, n]).unwrap();
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| plan.solve(&rhs.view(), &mut out.view_mut()).unwrap())
        });
    }
    group.finish();
}

fn channel_3d(c: &mut Criterion) {
    let mut group = c.benchmark_group("channel-fd2-3d");
    group.sample_size(20);
    for n in [16, 32, 64] {
        let plan = channel_plan(n);
        let rhs = random_field(&[n, n, n], 8);
        let mut out = Field::zeros(&[n, n, n]).unwrap();
        group.throughput(Throughput::Elements((n * n * n) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| plan.solve(&rhs.view(), &mut out.view_mut()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, periodic_2d, channel_3d);
criterion_main!(benches);
