use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nozzleflow_bench::laval_riemann;
use nozzleflow_core::scheme::advance_step;
use nozzleflow_core::{solve_riemann, GasConstants, GasState};

fn riemann(c: &mut Criterion) {
    let gas = GasConstants::new(5.0 / 3.0).unwrap();
    let pairs = [
        ("two_shocks", GasState::from_velocity(1.0, 1.0), GasState::from_velocity(1.0, -1.0)),
        ("two_rarefactions", GasState::from_velocity(1.0, -1.0), GasState::from_velocity(1.0, 1.0)),
        ("vacuum", GasState::from_velocity(1.0, -6.0), GasState::from_velocity(1.0, 6.0)),
        ("shock_tube", GasState::from_velocity(2.0, 0.0), GasState::from_velocity(0.2, 1.0)),
    ];
    let mut g = c.benchmark_group("riemann");
    for (name, ul, ur) in pairs {
        g.bench_function(name, |b| b.iter(|| solve_riemann(black_box(ul), black_box(ur), &gas).unwrap()));
    }
    g.finish();
}

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("advance_step");
    g.sample_size(20);
    for n in [50usize, 200] {
        let (params, profile, s0) = laval_riemann(1.0 / n as f64);
        g.bench_function(format!("laval_{n}"), |b| {
            b.iter(|| advance_step(black_box(&s0), &params, &profile, params.dt, 0, false).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, riemann, step);
criterion_main!(benches);
