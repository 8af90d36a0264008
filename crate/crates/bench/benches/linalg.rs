use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use outlift::{cokernel, matrix_order, phi_target, smith_normal_form};
use outlift_bench::{random_conjugate, random_matrix};

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for n in [4usize, 6, 8, 12] {
        let m = random_matrix(n as u64, n, n, 50);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| smith_normal_form(m))
        });
    }
    group.finish();
}

fn coinvariants(c: &mut Criterion) {
    let m = random_conjugate(5, &phi_target(8), 30);
    let mmi = m.minus_identity().expect("square");
    c.bench_function("cokernel_phi8_conjugate", |b| b.iter(|| cokernel(&mmi)));
    c.bench_function("matrix_order_phi8_conjugate", |b| {
        b.iter(|| matrix_order(&m))
    });
}

criterion_group!(benches, snf, coinvariants);
criterion_main!(benches);
