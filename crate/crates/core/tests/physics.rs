use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rabi_core::dynamics::{
    build_drift, excitation, integrate, Method, Mode, Model, Observable,
};
use rabi_core::effective::{effective_hamiltonian_coefficients, effective_params};
use rabi_core::params::{from_mhz, SystemParams};
use rabi_core::stability::{classical_steady_state, STEADY_STATE_TOL};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn effective_energy_is_conserved_without_decay() {
    let p = SystemParams::fig2().without_decay();
    let e = effective_params(&p).unwrap();
    let h = effective_hamiltonian_coefficients(&e).unwrap();
    let m = build_drift(Model::Effective, &p).unwrap();
    let mut x0 = excitation(Model::Effective, Mode::EnsembleL, c(1.0, 0.0));
    for (k, v) in excitation(Model::Effective, Mode::Mechanical, c(0.3, -0.2)).into_iter().enumerate() {
        x0[k] += v;
    }
    let e0 = h.energy(&x0);
    for (method, tol) in [(Method::Expm, 1e-9), (Method::Rk4, 1e-6)] {
        let traj = integrate(&m, &x0, 10.0, 0.1, method).unwrap();
        let drift = traj
            .states()
            .iter()
            .map(|s| (h.energy(s) - e0).abs())
            .fold(0.0, f64::max);
        assert!(drift <= tol * e0.abs(), "{method:?}: {drift:e} of {e0:e}");
    }
}

#[test]
fn direct_coupling_alone_conserves_ensemble_population() {
    let p = SystemParams {
        g1: 0.0,
        ..SystemParams::fig2()
    }
    .without_decay();
    let m = build_drift(Model::Effective, &p).unwrap();
    let x0 = excitation(Model::Effective, Mode::EnsembleL, c(1.0, 0.0));
    let traj = integrate(&m, &x0, 10.0, 0.05, Method::Expm).unwrap();
    let cl = traj.population(Observable::PopCL).unwrap();
    let cr = traj.population(Observable::PopCR).unwrap();
    for (a, b) in cl.iter().zip(&cr) {
        assert_relative_eq!(a + b, 1.0, max_relative = 1e-10);
    }
    // two-level Rabi formula with the Stark-shift mismatch as detuning:
    // P_R(t) = (C/Ω)² sin²(Ωt), Ω² = C² + ((Δ_L − Δ_R)/2)²
    let e = effective_params(&p).unwrap();
    let cc = e.direct_coupling;
    let half = 0.5 * (e.stark_detuning_l - e.stark_detuning_r);
    let omega = (cc * cc + half * half).sqrt();
    for (t, b) in traj.times().iter().zip(&cr) {
        let expected = (cc / omega).powi(2) * (omega * t).sin().powi(2);
        assert!((b - expected).abs() < 1e-9, "t = {t}: {b} vs {expected}");
    }
}

#[test]
fn evolution_is_linear() {
    let p = SystemParams::fig2();
    for model in [Model::Full, Model::Reduced, Model::Effective] {
        let m = build_drift(model, &p).unwrap();
        let a = excitation(model, Mode::EnsembleL, c(1.0, 0.5));
        let b = excitation(model, Mode::Mechanical, c(-0.2, 0.7));
        let sum: Vec<C64> = a.iter().zip(&b).map(|(u, v)| 2.0 * u - 3.0 * v).collect();
        let run = |x: &[C64]| integrate(&m, x, 1.0, 0.25, Method::Expm).unwrap();
        let (ta, tb, ts) = (run(&a), run(&b), run(&sum));
        for ((sa, sb), ss) in ta.states().iter().zip(tb.states()).zip(ts.states()) {
            for ((u, v), w) in sa.iter().zip(sb).zip(ss) {
                assert!((2.0 * u - 3.0 * v - w).norm() < 1e-10, "{model}");
            }
        }
    }
}

#[test]
fn trajectories_stay_conjugate_paired() {
    let p = SystemParams::fig2();
    for model in [Model::Full, Model::Reduced, Model::Effective] {
        let m = build_drift(model, &p).unwrap();
        let x0 = excitation(model, Mode::EnsembleL, c(0.6, 0.8));
        let traj = integrate(&m, &x0, 3.0, 0.1, Method::Rk4).unwrap();
        assert!(traj.pairing_residual() < 1e-12, "{model}");
    }
}

/// Heisenberg mean-field right-hand sides written out on the 10 real
/// unknowns (Re, Im of a_L, a_R, b, c_L, c_R).
fn oracle_rates(p: &SystemParams, eps: f64, u: &DVector<f64>) -> DVector<f64> {
    let z = |k: usize| c(u[2 * k], u[2 * k + 1]);
    let (al, ar, b, cl, cr) = (z(0), z(1), z(2), z(3), z(4));
    let i = c(0.0, 1.0);
    let x = b.re * 2.0;
    let dal = -i * (c(p.delta_l, -p.gamma_c / 2.0) * al - p.tunnelling * ar - p.g1 * x * al + p.g_coll * cl + eps);
    let dar = -i * (c(p.delta_r, -p.gamma_c / 2.0) * ar - p.tunnelling * al + p.g1 * x * ar + p.g_coll * cr);
    let db = -i * (c(p.omega_m, -p.gamma_m / 2.0) * b - p.g1 * (al.norm_sqr() - ar.norm_sqr()));
    let dcl = -i * (c(p.atom_detuning_l, -p.gamma_at / 2.0) * cl + p.g_coll * al);
    let dcr = -i * (c(p.atom_detuning_r, -p.gamma_at / 2.0) * cr + p.g_coll * ar);
    DVector::from_iterator(10, [dal, dar, db, dcl, dcr].iter().flat_map(|v| [v.re, v.im]))
}

fn newton_oracle(p: &SystemParams, eps: f64) -> DVector<f64> {
    let mut u = DVector::zeros(10);
    for _ in 0..50 {
        let f = oracle_rates(p, eps, &u);
        if f.amax() < 1e-12 {
            break;
        }
        let mut jac = DMatrix::zeros(10, 10);
        for k in 0..10 {
            let h = 1e-7 * u[k].abs().max(1.0);
            let mut up = u.clone();
            up[k] += h;
            let mut dn = u.clone();
            dn[k] -= h;
            jac.set_column(k, &((oracle_rates(p, eps, &up) - oracle_rates(p, eps, &dn)) / (2.0 * h)));
        }
        u -= jac.lu().solve(&f).expect("nonsingular Jacobian");
    }
    u
}

#[test]
fn steady_state_matches_newton_oracle() {
    let p = SystemParams {
        g1: from_mhz(5.0),
        ..SystemParams::fig2()
    };
    let eps = from_mhz(2900.0);
    let s = classical_steady_state(&p, eps).unwrap();
    assert!(s.residual <= STEADY_STATE_TOL);
    assert!((s.alpha_l.norm() - 1.0).abs() < 0.2, "|alpha_L| = {}", s.alpha_l.norm());

    let u = newton_oracle(&p, eps);
    let got = [s.alpha_l, s.alpha_r, s.beta, s.xi_l, s.xi_r];
    for (k, v) in got.iter().enumerate() {
        let expected = c(u[2 * k], u[2 * k + 1]);
        assert!((v - expected).norm() <= 1e-9 * expected.norm().max(1e-6), "component {k}: {v} vs {expected}");
    }
    // self-consistency against the oracle's equations
    let packed = DVector::from_iterator(10, got.iter().flat_map(|v| [v.re, v.im]));
    assert!(oracle_rates(&p, eps, &packed).amax() <= 10.0 * STEADY_STATE_TOL);
    assert_relative_eq!(s.r, s.radiation_shift(&p), max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn steady_state_residual_is_small(eps in 0.0..2000.0f64, g1 in 0.0..20.0f64, j in 0.0..3000.0f64) {
        let p = SystemParams { g1, tunnelling: j, ..SystemParams::fig2() };
        let s = classical_steady_state(&p, eps).unwrap();
        let u = DVector::from_iterator(
            10,
            [s.alpha_l, s.alpha_r, s.beta, s.xi_l, s.xi_r].iter().flat_map(|v| [v.re, v.im]),
        );
        prop_assert!(oracle_rates(&p, eps, &u).amax() <= 10.0 * STEADY_STATE_TOL);
    }

    #[test]
    fn reduced_and_effective_agree_when_antisymmetric(dp in 60.0..300.0f64, j in 300.0..800.0f64) {
        let p = SystemParams { tunnelling: from_mhz(j), ..SystemParams::fig2() }
            .with_modified_detunings(from_mhz(-dp), from_mhz(dp));
        let run = |model| {
            let m = build_drift(model, &p).unwrap();
            let x0 = excitation(model, Mode::EnsembleL, c(1.0, 0.0));
            integrate(&m, &x0, 3.0, 0.01, Method::Expm).unwrap()
        };
        let d = rabi_core::dynamics::compare(&run(Model::Reduced), &run(Model::Effective), &[Observable::PopCL]).unwrap();
        prop_assert!(d[0].rms < 0.05, "rms {}", d[0].rms);
    }
}
