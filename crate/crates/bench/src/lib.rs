//! Criterion benchmarks for the solver kernels.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use kppf_core::ptw1d::{solve_vstar, DEFAULT_TOL};
use kppf_core::sim2d::{init_state, SimParams, Stepper};
use kppf_core::spectral::{qevp_principal, sl_principal};
use kppf_core::{FlowProfile, ReactionSpec};

pub fn ptw1d(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_vstar");
    for uc in [0.01, 0.3, 0.9] {
        let r = ReactionSpec::fisher(uc).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(uc), &r, |b, r| {
            b.iter(|| solve_vstar(black_box(r), DEFAULT_TOL).unwrap())
        });
    }
    g.finish();
}

pub fn spectral(c: &mut Criterion) {
    let flow = FlowProfile::poiseuille();
    let mut g = c.benchmark_group("eigen");
    for n in [400, 4000] {
        g.bench_with_input(BenchmarkId::new("qevp", n), &n, |b, &n| {
            b.iter(|| qevp_principal(&flow, black_box(2.0), 1.0, -1.0, n).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sl", n), &n, |b, &n| {
            b.iter(|| sl_principal(&flow, black_box(400.0), n).unwrap())
        });
    }
    g.finish();
}

pub fn sim_step(c: &mut Criterion) {
    let mut p = SimParams::new(FlowProfile::couette(), ReactionSpec::fisher(0.3).unwrap(), 1.0, 1.0);
    p.nx = 1024;
    p.ny = 64;
    let mut state = init_state(&p).unwrap();
    let mut stepper = Stepper::new(&p).unwrap();
    c.bench_function("sim2d_step_1024x65", |b| b.iter(|| stepper.step(black_box(&mut state))));
}

pub fn benchmarks(c: &mut Criterion) {
    ptw1d(c);
    spectral(c);
    sim_step(c);
}
