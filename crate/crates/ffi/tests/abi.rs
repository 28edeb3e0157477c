use std::ffi::{CStr, CString};
use std::ptr;

use rabi_core::effective::effective_params;
use rabi_core::params::{from_mhz, SystemParams};
use rabi_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rabi_last_error()) }.to_str().unwrap().to_string()
}

fn preset(code: u32) -> *mut RabiParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rabi_params_preset(code, &mut p) }, RabiStatus::Ok);
    assert!(!p.is_null());
    p
}

fn get(p: *const RabiParams, key: &str) -> f64 {
    let key = CString::new(key).unwrap();
    let mut v = f64::NAN;
    assert_eq!(unsafe { rabi_params_get(p, key.as_ptr(), &mut v) }, RabiStatus::Ok, "{}", last_error());
    v
}

#[test]
fn effective_matches_core() {
    let p = preset(RABI_PRESET_FIG2);
    let mut e = RabiEffective::default();
    assert_eq!(unsafe { rabi_effective(p, &mut e) }, RabiStatus::Ok);
    let core = effective_params(&SystemParams::fig2()).unwrap();
    assert_eq!(e.direct_coupling, core.direct_coupling);
    assert_eq!(e.g_eff_r, core.g_eff_r);
    assert!(e.antisymmetric);
    assert!((e.direct_coupling / from_mhz(1.0) + 0.192289).abs() < 1e-6);
    unsafe { rabi_params_free(p) };
}

#[test]
fn set_and_get_round_trip() {
    let p = preset(RABI_PRESET_FIG2);
    let key = CString::new("J").unwrap();
    assert_eq!(unsafe { rabi_params_set(p, key.as_ptr(), 1234.5) }, RabiStatus::Ok);
    assert_eq!(get(p, "J"), 1234.5);

    let dl = CString::new("delta_L_prime").unwrap();
    assert_eq!(unsafe { rabi_params_set(p, dl.as_ptr(), -321.0) }, RabiStatus::Ok);
    assert!((get(p, "delta_L_prime") + 321.0).abs() < 1e-9);

    let bad = CString::new("J_typo").unwrap();
    assert_eq!(unsafe { rabi_params_set(p, bad.as_ptr(), 1.0) }, RabiStatus::InvalidConfig);
    assert!(last_error().contains("J_typo"), "{}", last_error());
    let mut v = 0.0;
    assert_eq!(unsafe { rabi_params_get(p, bad.as_ptr(), &mut v) }, RabiStatus::InvalidArgument);
    unsafe { rabi_params_free(p) };
}

#[test]
fn config_text_and_validation() {
    let text = CString::new("gamma_c = 0\ngamma_at = 0.01\ngamma_m = 0.001\nomega_m = 1000\nJ = 0\ng1 = 0\ng_coll = 0\ndelta_L_prime = -100\ndelta_R_prime = 100\nDelta_L = 10\nDelta_R = 10\nalpha = 1\n").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rabi_params_from_config(text.as_ptr(), &mut p) }, RabiStatus::InvalidConfig);
    assert!(p.is_null());
    assert!(!last_error().is_empty());

    let garbage = CString::new("J = =").unwrap();
    assert_eq!(unsafe { rabi_params_from_config(garbage.as_ptr(), &mut p) }, RabiStatus::InvalidConfig);
    assert!(last_error().contains("line 1"), "{}", last_error());

    let q = preset(RABI_PRESET_CASE_ONE);
    let mut warnings = 99;
    assert_eq!(unsafe { rabi_params_validate(q, &mut warnings) }, RabiStatus::Ok);
    assert!(last_error().is_empty());
    let mut regime = 0;
    assert_eq!(unsafe { rabi_regime(q, &mut regime) }, RabiStatus::Ok);
    assert_eq!(regime, RABI_REGIME_CASE_I);
    unsafe { rabi_params_free(q) };
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { rabi_params_preset(RABI_PRESET_FIG2, ptr::null_mut()) }, RabiStatus::NullPointer);
    let mut e = RabiEffective::default();
    assert_eq!(unsafe { rabi_effective(ptr::null(), &mut e) }, RabiStatus::NullPointer);
    assert!(last_error().contains("params"));
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { rabi_params_preset(7, &mut p) }, RabiStatus::InvalidArgument);
    unsafe {
        rabi_params_free(ptr::null_mut());
        rabi_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn simulate_effective_transfers_excitation() {
    let p = preset(RABI_PRESET_FIG2);
    let init = [RabiComplex::default(), RabiComplex { re: 1.0, im: 0.0 }, RabiComplex::default()];
    let mut t = ptr::null_mut();
    let status = unsafe { rabi_simulate(p, RABI_MODEL_EFFECTIVE, RABI_METHOD_EXPM, init.as_ptr(), 3, 12.0, 0.01, &mut t) };
    assert_eq!(status, RabiStatus::Ok, "{}", last_error());

    let mut len = 0;
    assert_eq!(unsafe { rabi_trajectory_len(t, &mut len) }, RabiStatus::Ok);
    assert_eq!(len, 1201);
    let mut times = vec![0.0; len];
    assert_eq!(unsafe { rabi_trajectory_times(t, times.as_mut_ptr(), len) }, RabiStatus::Ok);
    assert!((times[len - 1] - 12.0).abs() < 1e-12);

    let mut cl = vec![0.0; len];
    assert_eq!(unsafe { rabi_trajectory_population(t, RABI_POP_CL, cl.as_mut_ptr(), len) }, RabiStatus::Ok);
    assert_eq!(cl[0], 1.0);
    assert_eq!(
        unsafe { rabi_trajectory_population(t, RABI_POP_CL, cl.as_mut_ptr(), len - 1) },
        RabiStatus::BufferTooSmall
    );
    assert_eq!(
        unsafe { rabi_trajectory_population(t, RABI_POP_AL, cl.as_mut_ptr(), len) },
        RabiStatus::InvalidArgument
    );

    let mut period = 0.0;
    assert_eq!(unsafe { rabi_trajectory_period(t, RABI_POP_CL, &mut period) }, RabiStatus::Ok, "{}", last_error());
    let c = effective_params(&SystemParams::fig2()).unwrap().direct_coupling;
    assert!((period - std::f64::consts::PI / c.abs()).abs() < 0.1 * period, "{period}");
    unsafe {
        rabi_trajectory_free(t);
        rabi_params_free(p);
    }
}

#[test]
fn simulate_rejects_wrong_init_length() {
    let p = preset(RABI_PRESET_FIG2);
    let init = [RabiComplex::default(); 3];
    let mut t = ptr::null_mut();
    let status = unsafe { rabi_simulate(p, RABI_MODEL_FULL, RABI_METHOD_RK4, init.as_ptr(), 3, 1.0, 0.1, &mut t) };
    assert_eq!(status, RabiStatus::InvalidArgument);
    assert!(t.is_null());
    unsafe { rabi_params_free(p) };
}

#[test]
fn asymmetric_effective_model_is_invalid() {
    let p = preset(RABI_PRESET_FIG2);
    let key = CString::new("delta_R_prime").unwrap();
    assert_eq!(unsafe { rabi_params_set(p, key.as_ptr(), get(p, "delta_R_prime") + 50.0) }, RabiStatus::Ok);
    let init = [RabiComplex::default(), RabiComplex { re: 1.0, im: 0.0 }, RabiComplex::default()];
    let mut t = ptr::null_mut();
    let status = unsafe { rabi_simulate(p, RABI_MODEL_EFFECTIVE, RABI_METHOD_RK4, init.as_ptr(), 3, 1.0, 0.1, &mut t) };
    assert_eq!(status, RabiStatus::InvalidModel);
    unsafe { rabi_params_free(p) };
}

#[test]
fn stability_entry_points() {
    let p = preset(RABI_PRESET_FIG2);
    let (mut lp, mut lm, mut stable) = (RabiComplex::default(), RabiComplex::default(), false);
    assert_eq!(unsafe { rabi_cavity_stability(p, 3.0, &mut lp, &mut lm, &mut stable) }, RabiStatus::Ok);
    let gamma_c = get(p, "gamma_c");
    assert!((lp.re + 0.5 * gamma_c).abs() < 1e-9 * gamma_c);
    assert!((lp.im + lm.im).abs() < 1e-9 * lp.im.abs());
    assert!(stable);

    let mut ev = [RabiComplex::default(); RABI_FULL_DIM];
    let mut weight = [0.0; 4];
    assert_eq!(unsafe { rabi_spectrum_full(p, ev.as_mut_ptr(), weight.as_mut_ptr(), &mut stable) }, RabiStatus::Ok);
    assert!(stable);
    assert!(ev.iter().all(|v| v.re < 0.0));
    assert!(weight.iter().all(|&w| w >= 0.9), "{weight:?}");

    let mut r = f64::NAN;
    assert_eq!(unsafe { rabi_steady_state_shift(p, 0.0, &mut r) }, RabiStatus::Ok);
    assert_eq!(r, 0.0);
    unsafe { rabi_params_free(p) };
}

#[test]
fn clone_is_independent() {
    let p = preset(RABI_PRESET_FIG2);
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { rabi_params_clone(p, &mut q) }, RabiStatus::Ok);
    let key = CString::new("g1").unwrap();
    assert_eq!(unsafe { rabi_params_set(q, key.as_ptr(), 0.0) }, RabiStatus::Ok);
    assert_eq!(get(q, "g1"), 0.0);
    assert!(get(p, "g1") > 0.0);
    unsafe {
        rabi_params_free(p);
        rabi_params_free(q);
    }
}
