use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeezed_core::analytic::{
    accumulated_phase, center_state, default_fd_step, eval_pure_wavefunction, ode_residuals, quadrature_shape,
    schrodinger_residual, squeeze_from_initial_variance,
};
use squeezed_core::oracle::fidelity;
use squeezed_core::{CenterTrajectory, GaussianStateSpec, GridSpec, OscillatorConfig, SqueezeDynamics};

/// Adaptive Simpson quadrature, used as an independent reference for phase integrals.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

fn random_pure(rng: &mut ChaCha8Rng, osc: OscillatorConfig) -> GaussianStateSpec {
    let sq = SqueezeDynamics::pure(rng.random_range(1.0..5.0), rng.random_range(0.0..TAU)).unwrap();
    let amp = rng.random_range(0.0..5.0) * osc.ground_variance().sqrt();
    GaussianStateSpec::new(osc, sq, CenterTrajectory::new(amp, rng.random_range(0.0..TAU)).unwrap())
}

#[test]
fn phase_matches_integrated_rate_over_several_periods() {
    // φ̇ = ω/2A + (mω²/2ħ)(X² − 2x_c²)
    let osc = OscillatorConfig::new(1.3, 0.8, 0.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let spec = random_pure(&mut rng, osc);
        let w = osc.angular_frequency();
        let rate = |t: f64| {
            let (a, _) = quadrature_shape(&spec.squeeze, w, t);
            let (xc, _) = center_state(&spec.center, &osc, t);
            let x2 = spec.center.amplitude().powi(2);
            w / (2.0 * a) + osc.mass() * w * w / (2.0 * osc.hbar()) * (x2 - 2.0 * xc * xc)
        };
        let phi0 = accumulated_phase(&spec.squeeze, &spec.center, &osc, 0.0).unwrap();
        for t in [0.3 / w, 1.7 / w, 2.5 * osc.period()] {
            let reference = simpson(&rate, 0.0, t, 1e-13);
            let got = accumulated_phase(&spec.squeeze, &spec.center, &osc, t).unwrap() - phi0;
            assert!((got - reference).abs() < 1e-9, "t = {t}: {got} vs {reference}");
        }
    }
}

#[test]
fn phase_advances_a_quarter_turn_every_half_period() {
    let osc = OscillatorConfig::natural();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let center = CenterTrajectory::at_rest();
    for _ in 0..10 {
        let sq = SqueezeDynamics::pure(rng.random_range(1.0..5.0), rng.random_range(0.0..TAU)).unwrap();
        let t = rng.random_range(0.0..10.0);
        let gain = accumulated_phase(&sq, &center, &osc, t + PI).unwrap() - accumulated_phase(&sq, &center, &osc, t).unwrap();
        assert!((gain - FRAC_PI_2).abs() < 1e-9, "gain {gain}");
    }
    for t in [0.0, 0.5, 3.0, 40.0] {
        let phi = accumulated_phase(&SqueezeDynamics::ground(), &center, &osc, t).unwrap();
        assert!((phi - 0.5 * t).abs() < 1e-12);
    }
}

#[test]
fn ode_residuals_certify_pure_and_reject_broken_constraint() {
    let osc = OscillatorConfig::natural();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sq = SqueezeDynamics::pure(2.3, 0.7).unwrap();
    for _ in 0..100 {
        let r = ode_residuals(&sq, &osc, rng.random_range(0.0..20.0), default_fd_step(&osc));
        assert!(r.max() <= 1e-6, "{r:?}");
    }
    // P = (2 + 0.5)(2 - 0.5) = 3.75
    let broken = SqueezeDynamics::new(2.0, 0.5, 0.0).unwrap();
    let r = ode_residuals(&broken, &osc, 0.4, default_fd_step(&osc));
    assert!(r.pure_constraint > 0.1, "{r:?}");
}

#[test]
fn closed_form_solves_the_schrodinger_equation() {
    let osc = OscillatorConfig::new(0.7, 1.9, 1.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..4 {
        let spec = random_pure(&mut rng, osc);
        let grid = GridSpec::for_state(&spec, 512).unwrap();
        for _ in 0..3 {
            let t = rng.random_range(0.0..osc.period());
            let r = schrodinger_residual(&spec, &grid, t, default_fd_step(&osc)).unwrap();
            assert!(r <= 1e-5, "residual {r:e}");
        }
    }
}

#[test]
fn ground_versus_squeezed_vacuum_overlap() {
    // |<ψ1|ψ2>|² = 2 s1 s2 / (s1² + s2²) with s² the variances, here 1/2 and 1
    let osc = OscillatorConfig::natural();
    let ground = GaussianStateSpec::new(osc, SqueezeDynamics::ground(), CenterTrajectory::at_rest());
    let sq = squeeze_from_initial_variance(2.0 * osc.ground_variance(), &osc).unwrap();
    let wide = GaussianStateSpec::new(osc, sq, CenterTrajectory::at_rest());
    let grid = GridSpec::for_state(&wide, 512).unwrap();
    let a = eval_pure_wavefunction(&ground, &grid, 0.0).unwrap();
    let b = eval_pure_wavefunction(&wide, &grid, 0.0).unwrap();
    let expected = 2.0 * 2f64.sqrt() / 3.0;
    assert!((fidelity(&a, &b).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn shape_and_center_periods() {
    let osc = OscillatorConfig::new(1.0, 2.0, 1.0).unwrap();
    let spec = GaussianStateSpec::new(osc, SqueezeDynamics::pure(3.0, 0.2).unwrap(), CenterTrajectory::new(1.0, 0.4).unwrap());
    for t in [0.0, 0.3, 1.1] {
        let shape = quadrature_shape(&spec.squeeze, 2.0, t);
        let later = quadrature_shape(&spec.squeeze, 2.0, t + osc.period() / 2.0);
        assert!((shape.0 - later.0).abs() < 1e-12 && (shape.1 - later.1).abs() < 1e-12);
        let c = center_state(&spec.center, &osc, t);
        let half = center_state(&spec.center, &osc, t + osc.period() / 2.0);
        assert!((c.0 + half.0).abs() < 1e-12 && (c.1 + half.1).abs() < 1e-12);
    }
}
