//! Randomized invariants across modules.

use num_complex::Complex64;
use proptest::prelude::*;

use crate::hopf::{hopf_coefficients, hopf_nu_roots, hopf_omega, leading_factor};
use crate::linear::{characteristic_polynomial, characteristic_residual, min_leak_modulus, spectrum, stability_bound};
use crate::model::{ModelParams, Sigmoid};
use crate::poly::RealPolynomial;
use crate::sim::{DelayMode, InitialCondition, Simulation, SimulationConfig};
use crate::turing::{dispersion_k_given_omega, dispersion_omega_given_k};

fn params() -> impl Strategy<Value = ModelParams> {
    (
        (0.1..10.0f64, 0.1..2.0f64, 0.1..10.0f64, 0.2..10.0f64),
        (0.1..20.0f64, 0.1..20.0f64, 0.0..30.0f64, 0.0..1.0f64),
    )
        .prop_map(|((alpha, tau, nu, r), (a_e, a_i, c, e_ext))| ModelParams {
            alpha,
            tau,
            nu,
            r,
            a_e,
            a_i,
            c,
            e_ext,
            ..ModelParams::default()
        })
}

/// Draws with `ατ + 1 − β(a_e − a_i) < 0`, built by choosing `c` last.
fn forced_params() -> impl Strategy<Value = ModelParams> {
    (params(), 0.05..3.0f64, 1.0..20.0f64).prop_map(|(p, excess, gap)| {
        let p = ModelParams {
            a_e: p.a_i + gap,
            c: 1.0,
            ..p
        };
        let unit = p.beta() * (p.a_e - p.a_i);
        ModelParams {
            c: (p.alpha * p.tau + 1.0) * (1.0 + excess) / unit,
            ..p
        }
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale.max(f64::MIN_POSITIVE))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn equilibrium_is_tau_e(p in params()) {
        prop_assert_eq!(p.equilibrium().to_bits(), (p.tau * p.e_ext).to_bits());
    }

    #[test]
    fn transfer_derivative_matches_difference(u in -8.0..8.0f64, gain in 0.2..5.0f64, theta in -3.0..5.0f64) {
        // deep saturation leaves only difference roundoff
        let v = theta + u / gain;
        let f = Sigmoid::new(gain, theta);
        let h = 1e-6;
        let fd = (f.value(v + h) - f.value(v - h)) / (2.0 * h);
        let d = f.derivative(v);
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-6), "{} vs {}", fd, d);
    }

    #[test]
    fn moments_match_quadrature(a_e in 0.1..20.0f64, a_i in 0.1..20.0f64, r in 0.1..10.0f64) {
        let p = ModelParams { a_e, a_i, r, ..ModelParams::default() };
        let k = p.kernel();
        for n in 0..=2 {
            let exact = k.moment(n).unwrap();
            let quad = k.moment_quadrature(n).unwrap();
            let scale = a_e.max(a_i / r.powi(n as i32)).max(exact.abs());
            prop_assert!((exact - quad).abs() <= 1e-8 * scale, "J{}: {} vs {}", n, exact, quad);
        }
        prop_assert!(k.abs_integral().unwrap() >= k.moment(0).unwrap().abs() * (1.0 - 1e-12));
    }

    #[test]
    fn zero_is_never_a_root(p in params(), k in 0.0..50.0f64) {
        prop_assert_eq!(characteristic_residual(&p, Complex64::new(0.0, 0.0), k).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sextic_factorizes(p in params()) {
        let h = hopf_coefficients(&p).unwrap();
        let shifts = &RealPolynomial::linear_factor(-p.nu) * &RealPolynomial::linear_factor(-p.nu * p.r);
        let product = &shifts * &h.quartic();
        prop_assert!(close(h.sextic().coeffs(), product.coeffs(), 1e-10));
        let direct = characteristic_polynomial(&p, 0.0).unwrap();
        prop_assert!(close(h.sextic().coeffs(), direct.coeffs(), 1e-10));
    }

    #[test]
    fn hopf_sign_structure(p in params()) {
        let h = hopf_coefficients(&p).unwrap();
        prop_assert!(h.b3 < 0.0);
        prop_assert_eq!(h.a4, p.tau);
        prop_assert!(h.q[0] > 0.0 && h.a0 > 0.0 && h.p[0] > 0.0);
    }

    #[test]
    fn consistent_frequency_is_a_quartic_root(p in params()) {
        if let Ok(w) = hopf_omega(&p) {
            if hopf_coefficients(&p).unwrap().consistency_residual(w) < 1e-6 {
                let q = hopf_coefficients(&p).unwrap().quartic();
                prop_assert!(q.normalized_residual(Complex64::new(0.0, w)) < 1e-6);
            }
        }
    }

    #[test]
    fn spectral_roots_satisfy_the_equation(p in params(), k in 0.0..30.0f64) {
        let s = spectrum(&p, k).unwrap();
        let edge = -(1.0f64).min(p.r);
        for z in &s.roots {
            if z.re / p.nu > edge + 1e-6 && (z + p.alpha).norm() > 1e-6 {
                let res = characteristic_residual(&p, *z, k).unwrap().norm();
                prop_assert!(res < 1e-8, "lambda = {}: {:e}", z, res);
            }
        }
    }

    #[test]
    fn leak_modulus_is_at_least_one(p in params()) {
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        prop_assert!(min_leak_modulus(&p, &grid) >= 1.0);
    }

    #[test]
    fn dispersion_round_trip(p in params(), k in 0.05..40.0f64) {
        let singular = (p.alpha / p.tau).sqrt();
        if let Ok(points) = dispersion_omega_given_k(&p, k) {
            for q in points {
                prop_assert!(q.k != 0.0 && q.omega != 0.0);
                if (q.omega - singular).abs() > 1e-3 * singular && q.residual < 1e-9 {
                    let back = dispersion_k_given_omega(&p, q.omega).unwrap().unwrap();
                    prop_assert!((back.k - k).abs() <= 1e-6 * k, "{} vs {}", back.k, k);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    // D < 1 leaves no unstable wavenumber.
    #[test]
    fn sufficient_bound_implies_stability(p in params()) {
        let b = stability_bound(&p).unwrap();
        if b.sufficient_stable {
            for i in 0..=500 {
                let k = i as f64 * 0.1;
                let s = spectrum(&p, k).unwrap();
                prop_assert!(s.max_real_part < 0.0, "k = {}: {}", k, s.max_real_part);
            }
        }
    }

    #[test]
    fn equilibrium_survives_long_runs(p in params()) {
        let cfg = SimulationConfig {
            length: 10.0 * (1.0f64).max(1.0 / p.r),
            points: 8,
            dt: crate::sim::max_dt(&p),
            duration: 1e4 * crate::sim::max_dt(&p),
            initial: InitialCondition::Constant { value: None },
            ..SimulationConfig::default()
        };
        let mut sim = Simulation::new(&p, &cfg).unwrap();
        for _ in 0..10_000 {
            sim.step().unwrap();
        }
        let v0 = p.equilibrium();
        prop_assert!(sim.v().iter().all(|v| (v - v0).abs() < 1e-8));
    }

    #[test]
    fn records_are_deterministic(p in params(), seed in any::<u64>()) {
        let cfg = SimulationConfig {
            length: 10.0 * (1.0f64).max(1.0 / p.r),
            points: 16,
            dt: crate::sim::max_dt(&p),
            duration: 100.0 * crate::sim::max_dt(&p),
            seed,
            record_stride: 10,
            ..SimulationConfig::default()
        };
        let a = crate::sim::run(&p, &cfg).unwrap();
        let b = crate::sim::run(&p, &cfg).unwrap();
        prop_assert!(a.values.iter().flatten().zip(b.values.iter().flatten()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn tiny_delays_match_instantaneous(p in params()) {
        let length = 10.0 * (1.0f64).max(1.0 / p.r);
        let dt = crate::sim::max_dt(&p);
        let cfg = SimulationConfig {
            length,
            points: 16,
            dt,
            duration: 10.0,
            ..SimulationConfig::default()
        };
        let gap = |mult: f64| {
            let fast = ModelParams { nu: mult * length / dt, ..p };
            let mut a = Simulation::new(&fast, &cfg).unwrap();
            let mut b = Simulation::new(&fast, &SimulationConfig { delay_mode: DelayMode::Instantaneous, ..cfg.clone() }).unwrap();
            for _ in 0..cfg.steps() {
                a.step().unwrap();
                b.step().unwrap();
            }
            a.v().iter().zip(b.v()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        // The gap is first order in the largest delay, not zero once delays drop below dt.
        let (near, far) = (gap(1e6), gap(1e8));
        prop_assert!(far < 1e-5, "{:e}", far);
        if near > 1e-9 {
            let ratio = near / far;
            prop_assert!((50.0..200.0).contains(&ratio), "{:e} / {:e}", near, far);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    // A forced discriminant always yields a critical speed.
    #[test]
    fn forced_region_has_critical_speed(p in forced_params()) {
        prop_assume!(leading_factor(&p) < 0.0);
        let roots = hopf_nu_roots(&p).unwrap();
        prop_assert!(!roots.is_empty());
    }
}

