mod common;

use alip_drs::model::{self, Axis, DrsMotion, PlanarState, Plane, SampledProfile, Sinusoid};
use common::{adaptive_quad, digit, expm_series, forcing_by_quadrature, forcing_by_quadrature_split, rk4_flow};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn quadrature_oracle_sanity() {
    let v = adaptive_quad(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-14);
    assert!((v - 2.0).abs() < 1e-13);
}

#[test]
fn transition_matches_series_expm() {
    let p = digit();
    for plane in [Plane::Sagittal, Plane::Frontal] {
        let a = model::system_matrix(&p, plane);
        for dt in [-0.3, 0.0, 0.01, 0.4, 1.7] {
            let closed = model::transition_matrix(&p, dt, plane).unwrap();
            let series = expm_series(&a, dt);
            let scale = series.abs().max();
            assert!((closed - series).abs().max() < 1e-12 * scale, "{plane:?} dt={dt}");
        }
    }
}

#[test]
fn forcing_matches_quadrature_on_random_sinusoids() {
    let p = digit();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let axis = if rng.random::<bool>() { Axis::X } else { Axis::Y };
        let plane = if axis == Axis::X { Plane::Sagittal } else { Plane::Frontal };
        let mut drs = DrsMotion::stationary();
        for _ in 0..rng.random_range(1..4) {
            let term = Sinusoid::new(
                axis,
                rng.random_range(0.01..0.2),
                rng.random_range(0.3..8.0),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
            .unwrap();
            drs = drs.with_term(term);
        }
        let t1 = rng.random_range(0.0..10.0);
        let t2 = t1 + rng.random_range(0.05..0.8);
        let v = model::forcing_integral(&p, &drs, plane, t1, t2).unwrap();
        let (q1, q2) = forcing_by_quadrature(&p, &drs, plane, t1, t2);
        assert!((v.v1 - q1).abs() <= 1e-9 * q1.abs().max(1e-3), "v1 {} vs {q1}", v.v1);
        assert!((v.v2 - q2).abs() <= 1e-9 * q2.abs().max(1e-1), "v2 {} vs {q2}", v.v2);
    }
}

#[test]
fn sampled_profile_forcing_matches_quadrature() {
    let p = digit();
    let n = 64;
    let samples: Vec<f64> = (0..n)
        .map(|i| 0.05 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect();
    let spacing = 1.2 / n as f64;
    let drs = DrsMotion::stationary().with_profile(Axis::X, SampledProfile::new(samples, spacing).unwrap());
    let knots: Vec<f64> = (0..=2 * n).map(|i| i as f64 * spacing).collect();
    for (t1, t2) in [(0.0, 0.4), (0.33, 0.73), (1.1, 1.5)] {
        let v = model::forcing_integral(&p, &drs, Plane::Sagittal, t1, t2).unwrap();
        let (q1, q2) = forcing_by_quadrature_split(&p, &drs, Plane::Sagittal, t1, t2, &knots);
        assert!((v.v1 - q1).abs() < 1e-10 && (v.v2 - q2).abs() < 1e-8, "{v:?} vs ({q1}, {q2})");
    }
}

#[test]
fn flow_matches_rk4_one_step() {
    let p = digit();
    let cases = [
        DrsMotion::sinusoid(Axis::X, 0.04, 0.4, 0.0),
        DrsMotion::sinusoid(Axis::X, 0.14, 6.0, 0.0),
        DrsMotion::sinusoid(Axis::Y, 0.06, 0.72, 0.0),
        DrsMotion::sinusoid(Axis::X, 0.04, 0.4, 0.0).with_term(Sinusoid::new(Axis::Y, 0.1, 6.0, 0.0).unwrap()),
    ];
    for drs in &cases {
        for plane in [Plane::Sagittal, Plane::Frontal] {
            let x = PlanarState::new(plane, 0.03, -2.0);
            let closed = model::flow(&x, 0.8, 1.2, &p, drs).unwrap();
            let rk = rk4_flow(&x, 0.8, 1.2, &p, drs, 1e-5);
            assert!((closed.pos - rk.pos).abs() < 1e-6 && (closed.mom - rk.mom).abs() < 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn flow_matches_rk4_random(
        pos in -0.3f64..0.3, mom in -20.0f64..20.0, amp in 0.0f64..0.2, period in 0.3f64..7.0,
        t1 in 0.0f64..5.0, dt in 0.01f64..0.5,
    ) {
        let p = digit();
        let drs = DrsMotion::sinusoid(Axis::X, amp, period, 0.3);
        let x = PlanarState::new(Plane::Sagittal, pos, mom);
        let closed = model::flow(&x, t1, t1 + dt, &p, &drs).unwrap();
        let rk = rk4_flow(&x, t1, t1 + dt, &p, &drs, 1e-4);
        prop_assert!((closed.pos - rk.pos).abs() < 1e-8);
        prop_assert!((closed.mom - rk.mom).abs() < 1e-6);
    }
}
