//! One worker against the full pool on the data-parallel kernels. Build with
//! `--no-default-features` for the purely sequential code path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dynheight::arithmetic::Caps;
use dynheight::complexdyn::{backward_orbit_complex, DEFAULT_BITS};
use dynheight::mp::BigComplex;
use dynheight::padic::backward_orbit_padic;
use dynheight::pairing::circle_average_green;
use dynheight::par::{is_parallel, with_threads};

fn workers() -> Vec<usize> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    if is_parallel() {
        vec![1, all.max(2)]
    } else {
        vec![1]
    }
}

fn complex_orbit(c: &mut Criterion) {
    let mut g = c.benchmark_group("complex_orbit_p2_n10");
    g.sample_size(10);
    let target = BigComplex::from_int(1, DEFAULT_BITS);
    for t in workers() {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{t}_threads")),
            &t,
            |b, &t| {
                b.iter(|| {
                    with_threads(t, || {
                        black_box(backward_orbit_complex(2, 10, &target, DEFAULT_BITS).unwrap())
                    })
                })
            },
        );
    }
    g.finish();
}

fn padic_orbit(c: &mut Criterion) {
    let mut g = c.benchmark_group("padic_orbit_p3_n6");
    g.sample_size(10);
    for t in workers() {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{t}_threads")),
            &t,
            |b, &t| {
                b.iter(|| {
                    with_threads(t, || {
                        black_box(backward_orbit_padic(3, 6, 80, &Caps::default()).unwrap())
                    })
                })
            },
        );
    }
    g.finish();
}

fn circle_green(c: &mut Criterion) {
    let mut g = c.benchmark_group("circle_green_p5_m128");
    g.sample_size(10);
    for t in workers() {
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("{t}_threads")),
            &t,
            |b, &t| {
                b.iter(|| {
                    with_threads(t, || {
                        black_box(circle_average_green(5, 128, DEFAULT_BITS).unwrap())
                    })
                })
            },
        );
    }
    g.finish();
}

criterion_group!(benches, complex_orbit, padic_orbit, circle_green);
criterion_main!(benches);
