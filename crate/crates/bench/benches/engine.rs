use criterion::{black_box, criterion_group, criterion_main, Criterion};

use confstress::bogolubov::{compute_coefficients, kg_inner_product, BasisKind, ModeBasis, QUAD_TOL};
use confstress::jets::{elementary, Elementary};
use confstress::scenarios::{build_scenario, MIRROR_IN_RINDLER_VACUUM};
use confstress::stress::Rect;
use confstress::{ConformalChart, Jet3};

fn jets(c: &mut Criterion) {
    c.bench_function("jet3 exp(sinh(x)) * sqrt(x)", |b| {
        b.iter(|| {
            let x = Jet3::seed(black_box(0.7));
            let num = elementary(elementary(x, Elementary::Sinh).unwrap(), Elementary::Exp).unwrap();
            num * elementary(x, Elementary::Sqrt).unwrap()
        })
    });
}

fn grid(c: &mut Criterion) {
    let s = build_scenario(MIRROR_IN_RINDLER_VACUUM, 1.0).unwrap();
    let m = ConformalChart::minkowski();
    let pts = Rect::new(-1.99, -0.01, 0.01, 4.0).grid(32, 32);
    c.bench_function("mirror stress, 32x32 Minkowski grid", |b| {
        b.iter(|| pts.iter().map(|&(u, v)| s.evaluate(&m, u, v).unwrap().t_uu).sum::<f64>())
    });
}

fn bogolubov(c: &mut Criterion) {
    let unruh = ModeBasis::log_spaced(BasisKind::MinkowskiUnruh, 0.5, 2.0, 4, 0.01).unwrap();
    let rindler = ModeBasis::log_spaced(BasisKind::Rindler, 0.5, 2.0, 4, 0.01).unwrap();
    let (a, b) = (unruh.packets(), rindler.packets());
    c.bench_function("KG product, Rindler x Unruh packet", |bn| bn.iter(|| kg_inner_product(&b[1], &a[1], QUAD_TOL).unwrap()));
    let mut g = c.benchmark_group("bogolubov");
    g.sample_size(10);
    g.bench_function("4x8 coefficient matrix", |bn| bn.iter(|| compute_coefficients(&unruh, &rindler).unwrap()));
    g.finish();
}

criterion_group!(benches, jets, grid, bogolubov);
criterion_main!(benches);
