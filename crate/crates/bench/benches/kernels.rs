//! Throughput checks for the kernels the pipelines spend their time in:
//! symbol evaluation and family construction, the analytic special
//! functions at quadrature nodes, and the truncated Euler products.

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use quadtwist::arith::{fundamental_discriminants, kronecker, Family, Selector};
use quadtwist::curve::{Curve, HeckeTable};
use quadtwist::ratios::a_product;
use quadtwist::special::{digamma, zeta_with_deriv};
use quadtwist::testfn::{integrate_symmetric, QuadSpec, TestFunction};

fn symbols_and_families(c: &mut Criterion) {
    let mut g = c.benchmark_group("arith");
    g.bench_function("kronecker_10k_pairs", |b| {
        b.iter(|| {
            let mut acc = 0i64;
            for d in 1..10_000i64 {
                acc += kronecker(d, 999_983) as i64;
            }
            acc
        })
    });
    g.sample_size(10);
    g.bench_function("fundamental_discriminants_1e5", |b| {
        b.iter(|| fundamental_discriminants(100_000, false).unwrap().len())
    });
    g.bench_function("family_build_1e5", |b| {
        b.iter(|| {
            Family::build(100_000, 11, 1, Selector::ResidueSquare, false)
                .unwrap()
                .size()
        })
    });
    g.finish();
}

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("special");
    g.bench_function("zeta_with_deriv_t40", |b| {
        let s = Complex64::new(1.0, 40.0);
        b.iter(|| zeta_with_deriv(s).unwrap())
    });
    g.bench_function("digamma_t25", |b| {
        let z = Complex64::new(1.0, 25.0);
        b.iter(|| digamma(z).unwrap())
    });
    g.bench_function("sine_kernel_quadrature", |b| {
        let f = TestFunction::fejer(0.6).unwrap();
        let spec = QuadSpec::default().with_tail_eps(1e-6);
        b.iter(|| {
            integrate_symmetric(
                &|t: f64| {
                    let k = if t.abs() < 1e-9 {
                        1.0
                    } else {
                        (2.0 * std::f64::consts::PI * t).sin() / (2.0 * std::f64::consts::PI * t)
                    };
                    Complex64::new(f.eval(t) * k, 0.0)
                },
                &spec,
            )
            .unwrap()
            .value
        })
    });
    g.finish();
}

fn euler_products(c: &mut Criterion) {
    let table = HeckeTable::build(&Curve::eleven_a1(), 10_000).unwrap();
    let mut g = c.benchmark_group("ratios");
    g.bench_function("a_product_imaginary_diagonal", |b| {
        let r = Complex64::new(0.0, 0.8);
        b.iter(|| a_product(&table, -r, r, 10_000).unwrap())
    });
    g.sample_size(10);
    g.bench_function("hecke_table_build_1e4", |b| {
        b.iter(|| HeckeTable::build(&Curve::eleven_a1(), 10_000).unwrap().len())
    });
    g.finish();
}

criterion_group!(benches, symbols_and_families, special_functions, euler_products);
criterion_main!(benches);
