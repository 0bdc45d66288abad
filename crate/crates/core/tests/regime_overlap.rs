//! Agreement between neighbouring asymptotic formulas, and the enhancement
//! property across every regime.

use kppf_core::regimes::{
    interface_small_b, speed_large_a, speed_slowly_varying, speed_small_a, speed_small_b, speed_uc_near1,
    RegimeBands,
};
use kppf_core::FlowProfile;
use proptest::prelude::*;

const N: usize = 800;

fn flows() -> [FlowProfile; 2] {
    [FlowProfile::couette(), FlowProfile::poiseuille()]
}

#[test]
fn small_k_composite_meets_homogenised_speed() {
    let (a, v) = (0.1, 1.3);
    let b = 0.5 * v * a / 1e-2;
    for flow in flows() {
        let c = speed_small_a(&flow, a, b, v, N).unwrap();
        let h = speed_large_a(&flow, a, b, v).unwrap();
        let diff = (c.v_hat - h.v_hat).abs();
        assert!(diff <= c.error_estimate + h.error_estimate);
        // Both corrections reduce to ½v*A²Δ/B here; they agree to O(k).
        let rel = (c.correction_term / (h.v_hat - v) - 1.0).abs();
        assert!(rel < 0.02, "{rel}");
    }
}

#[test]
fn large_k_composite_meets_thin_front_speed() {
    let (a, v) = (0.1, 1.0);
    let b = 0.5 * v * a / 1e3;
    for flow in flows() {
        let c = speed_small_a(&flow, a, b, v, 4000).unwrap();
        let s = speed_small_b(&flow, a, b, v, N).unwrap();
        let diff = (c.v_hat - s.v_hat).abs();
        assert!(diff <= c.error_estimate + s.error_estimate, "{diff}");
        assert!(c.v_hat < s.v_hat);
    }
}

#[test]
fn wide_channel_composite_meets_bare_speed() {
    let bands = RegimeBands::default();
    for a in [0.1, 1.0] {
        for flow in flows() {
            let c = speed_small_a(&flow, a, 1e3, 1.0, N).unwrap();
            let w = speed_slowly_varying(&flow, a, 1e3, 1.0, N, &bands).unwrap();
            let diff = (c.v_hat - w.v_hat).abs();
            assert!(diff <= c.error_estimate.min(w.error_estimate), "{diff}");
        }
    }
}

#[test]
fn slowly_varying_error_tag_switches_with_a() {
    let bands = RegimeBands::default();
    let flow = FlowProfile::couette();
    let small = speed_slowly_varying(&flow, 0.1, 1e3, 1.0, N, &bands).unwrap();
    let unit = speed_slowly_varying(&flow, 1.0, 1e3, 1.0, N, &bands).unwrap();
    assert_eq!(small.error_order, "O(A^2/B)");
    assert_eq!(unit.error_order, "O(B^-1)");
    assert_eq!(unit.v_hat, 1.0);
}

#[test]
fn interfaces_are_mean_zero() {
    let bands = RegimeBands::default();
    for flow in flows() {
        let results = [
            speed_small_a(&flow, 0.1, 0.3, 1.2, N).unwrap(),
            speed_small_b(&flow, 1.0, 1e-3, 1.2, N).unwrap(),
            speed_slowly_varying(&flow, 0.5, 200.0, 1.2, N, &bands).unwrap(),
            speed_uc_near1(&flow, 2.0, 0.5, 0.95, -1.0, N).unwrap(),
        ];
        for r in results {
            let i = r.interface.unwrap();
            assert!(i.mean().abs() < 1e-8, "{}: {}", r.regime, i.mean());
            let h = 1.0 / N as f64;
            let jump = i.zeta.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            assert!(jump < 1e3 * h, "{}: {jump}", r.regime);
        }
        let s = interface_small_b(&flow, 1.0, 1e-3, 1.2, N).unwrap();
        assert!(kppf_core::quad::trapezoid_mean(&s.z0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_never_slows_the_front(la in -2.0f64..2.0, lb in -3.0f64..3.0, v in 0.05f64..1.99) {
        let (a, b) = (10f64.powf(la), 10f64.powf(lb));
        let bands = RegimeBands::default();
        for flow in flows() {
            let strict = [
                speed_large_a(&flow, a, b, v).unwrap(),
                speed_small_a(&flow, a, b, v, 200).unwrap(),
                speed_small_b(&flow, a, b, v, 200).unwrap(),
            ];
            for r in strict {
                prop_assert!(r.v_hat > v, "{} {}", r.regime, r.v_hat);
            }
            let w = speed_slowly_varying(&flow, a, b, v, 200, &bands).unwrap();
            prop_assert!(w.v_hat >= v);
            let u = speed_uc_near1(&flow, a, b, 0.95, -1.0, 200).unwrap();
            prop_assert!(u.v_hat > u.v_star, "{} vs {}", u.v_hat, u.v_star);
        }
        let zero = FlowProfile::zero();
        prop_assert_eq!(speed_large_a(&zero, a, b, v).unwrap().v_hat, v);
        prop_assert_eq!(speed_small_a(&zero, a, b, v, 200).unwrap().v_hat, v);
    }
}
