use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use zcancel_core::blowups::{derive_sequence, replay};
use zcancel_core::cancellation::{cylinders_isomorphic, generate_family};
use zcancel_core::covering::hj_string;
use zcancel_core::equations::classify;
use zcancel_core::equations::poly::{Poly1, Ring};
use zcancel_core::trees::{gamma, validate_contractible};
use zcancel_core::{DanielewskiForm, GraphDivisor, Mode};

fn one(d: usize, m: usize) -> GraphDivisor {
    GraphDivisor::over_line(vec![("0".into(), gamma(d, m))])
}

fn trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("trees");
    for (d, m) in [(2, 4), (4, 8), (8, 16)] {
        let t = gamma(d, m);
        group.bench_with_input(BenchmarkId::new("canonical_form", format!("{d}x{m}")), &t, |b, t| {
            b.iter(|| t.canonical_form())
        });
        group.bench_with_input(BenchmarkId::new("contract", format!("{d}x{m}")), &t, |b, t| {
            b.iter(|| validate_contractible(t).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("derive_replay", format!("{d}x{m}")), &t, |b, t| {
            b.iter(|| replay(&derive_sequence(t).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn cancellation(c: &mut Criterion) {
    let (a, b) = (one(3, 2), one(3, 7));
    c.bench_function("cylinders_isomorphic 3x2 vs 3x7", |bench| {
        bench.iter(|| cylinders_isomorphic(black_box(&a), black_box(&b), Mode::OverBase, false))
    });
    let g = one(2, 1);
    c.bench_function("generate_family k=8", |b| b.iter(|| generate_family(black_box(&g), 8).unwrap()));
}

fn equations(c: &mut Criterion) {
    let g = DanielewskiForm::new(3, vec![Poly1::from_ints(&[0, -1, 0, 1]), Poly1::from_ints(&[1, 2]), Poly1::zero()]).unwrap();
    let h = DanielewskiForm::parse("z^3*t - (u^3 - 4*u) - (2*u + 8)*z = 0").unwrap();
    c.bench_function("classify d=3 m=3", |b| b.iter(|| classify(black_box(&g), black_box(&h))));
    c.bench_function("hj_string n<=50", |b| {
        b.iter(|| {
            for n in 2..=50u64 {
                for q in 1..n {
                    let _ = black_box(hj_string(n, q));
                }
            }
        })
    });
}

criterion_group!(benches, trees, cancellation, equations);
criterion_main!(benches);
