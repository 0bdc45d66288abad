//! Coarse-grid simulator runs checked against the one-dimensional wave and
//! against the grid-independent structure of the interface.

use kppf_core::ptw1d::solve_vstar;
use kppf_core::sim2d::{extract_interface, init_state, reaction_integral_speed, run_to_ptw, SimParams, Stepper};
use kppf_core::{FlowProfile, ReactionSpec};

fn coarse(flow: FlowProfile, a: f64, b: f64, u_c: f64) -> SimParams {
    let mut p = SimParams::new(flow, ReactionSpec::fisher(u_c).unwrap(), a, b);
    p.nx = 512;
    p.ny = 16;
    p.x_extent = 20.0;
    p.t_end = 12.0;
    p.sample_interval = 0.1;
    p.plateau_tol = 0.0;
    p
}

#[test]
fn no_flow_speed_approaches_travelling_wave() {
    let p = coarse(FlowProfile::zero(), 0.0, 1.0, 0.3);
    let v = solve_vstar(&p.reaction, 1e-10).unwrap().v_star;
    let out = run_to_ptw(&p).unwrap();
    assert!((out.speed - v).abs() < 0.03 * v, "{} vs {v}", out.speed);
    let r = out.reaction_speed.unwrap();
    assert!((r - out.speed).abs() < 0.02 * out.speed, "{r} vs {}", out.speed);
    assert!(out.final_sample.zeta.iter().all(|z| z.abs() < 1e-12));
}

#[test]
fn plateau_detector_stops_early() {
    let mut p = coarse(FlowProfile::zero(), 0.0, 1.0, 0.3);
    p.t_end = 200.0;
    p.plateau_tol = 1e-3;
    p.check_interval = 4.0;
    let out = run_to_ptw(&p).unwrap();
    assert!(out.converged);
    assert!(out.t_final < 200.0);
}

#[test]
fn reaction_integral_is_insensitive_to_window_margins() {
    let mut p = coarse(FlowProfile::couette(), 0.5, 1.0, 0.3);
    p.t_end = 6.0;
    let narrow = run_to_ptw(&p).unwrap().reaction_speed.unwrap();
    p.x_extent *= 2.0;
    p.nx *= 2;
    let wide = run_to_ptw(&p).unwrap().reaction_speed.unwrap();
    assert!((narrow - wide).abs() < 1e-3 * wide, "{narrow} vs {wide}");
}

#[test]
fn window_edge_is_reported() {
    let mut p = coarse(FlowProfile::zero(), 0.0, 1.0, 0.3);
    p.recenter = false;
    p.x_extent = 4.0;
    p.nx = 128;
    let mut s = init_state(&p).unwrap();
    let mut st = Stepper::new(&p).unwrap();
    while s.t < 4.0 {
        st.step(&mut s);
    }
    assert_eq!(reaction_integral_speed(&s, &p).unwrap_err().kind(), "window_edge");
}

#[test]
fn interface_meets_walls_normally() {
    // One-sided wall slope of ζ shrinks as the wall-normal grid is refined.
    let slopes: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&ny| {
            let mut p = coarse(FlowProfile::couette(), 1.0, 1.0, 0.3);
            p.ny = ny;
            p.nx = 256;
            p.x_extent = 10.0;
            let mut s = init_state(&p).unwrap();
            let mut st = Stepper::new(&p).unwrap();
            while s.t < 1.0 {
                st.step(&mut s);
            }
            let z = extract_interface(&s, &p).unwrap().zeta;
            let h = 1.0 / ny as f64;
            ((z[1] - z[0]) / h).abs().max(((z[ny] - z[ny - 1]) / h).abs())
        })
        .collect();
    assert!(slopes.windows(2).all(|w| w[1] < 0.6 * w[0]), "{slopes:?}");
}
