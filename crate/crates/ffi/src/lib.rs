//! C ABI for `rabi-core`.
//!
//! Every function returns a [`RabiStatus`]; results are written through out
//! pointers. On failure, [`rabi_last_error`] describes the most recent error on
//! the calling thread. Parameters and trajectories are opaque handles that must
//! be released with their `_free` functions.
//!
//! All frequencies cross the boundary in rad/µs and times in µs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64 as C64;
use rabi_core::cli::{RawConfig, Units};
use rabi_core::dynamics::{self, Label, Method, Model, Observable, Trajectory};
use rabi_core::effective::{self, Regime};
use rabi_core::params::{validate, SystemParams};
use rabi_core::{stability, Error};

pub const RABI_PRESET_FIG2: u32 = 0;
pub const RABI_PRESET_CASE_ONE: u32 = 1;
pub const RABI_PRESET_CASE_TWO: u32 = 2;

pub const RABI_MODEL_FULL: u32 = 0;
pub const RABI_MODEL_REDUCED: u32 = 1;
pub const RABI_MODEL_EFFECTIVE: u32 = 2;

pub const RABI_METHOD_RK4: u32 = 0;
pub const RABI_METHOD_EXPM: u32 = 1;

pub const RABI_POP_CL: u32 = 0;
pub const RABI_POP_CR: u32 = 1;
pub const RABI_POP_AL: u32 = 2;
pub const RABI_POP_AR: u32 = 3;
pub const RABI_POP_B: u32 = 4;

pub const RABI_REGIME_NEITHER: u32 = 0;
pub const RABI_REGIME_CASE_I: u32 = 1;
pub const RABI_REGIME_CASE_II: u32 = 2;

/// Number of eigenvalues written by [`rabi_spectrum_full`].
pub const RABI_FULL_DIM: usize = 10;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RabiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed config text or parameters rejected by validation.
    InvalidConfig = 3,
    /// The requested model does not apply, e.g. effective model with δ′_L ≠ −δ′_R.
    InvalidModel = 4,
    /// z = xy − J² vanishes; the cavity modes cannot be eliminated.
    Singular = 5,
    /// Eigensolver failure or steady-state non-convergence.
    Numerical = 6,
    /// Output buffer shorter than required.
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RabiComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for RabiComplex {
    fn from(v: C64) -> Self {
        RabiComplex { re: v.re, im: v.im }
    }
}

/// Effective couplings after eliminating the cavity modes, rad/µs.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RabiEffective {
    /// C = −ḡ²N J/|z_R|.
    pub direct_coupling: f64,
    pub g_eff: RabiComplex,
    pub g_bar_eff: RabiComplex,
    pub g_eff_r: f64,
    pub g_bar_eff_r: f64,
    pub lambda: f64,
    pub omega_m_tilde: f64,
    pub stark_detuning_l: f64,
    pub stark_detuning_r: f64,
    pub gamma_at_eff: f64,
    /// Re z, (rad/µs)².
    pub z_r: f64,
    pub antisymmetric: bool,
}

pub struct RabiParams(SystemParams);

pub struct RabiTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(RabiStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config { .. } => RabiStatus::InvalidConfig,
            Error::InvalidModel(_) => RabiStatus::InvalidModel,
            Error::SingularElimination { .. } => RabiStatus::Singular,
            Error::Domain(_)
            | Error::DimensionMismatch { .. }
            | Error::NotConjugatePaired { .. }
            | Error::GridMismatch(_) => RabiStatus::InvalidArgument,
            _ => RabiStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: RabiStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RabiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RabiStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RabiStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(RabiStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(RabiStatus::NullPointer, format!("{name} is null")))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(RabiStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RabiStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn model(code: u32) -> Result<Model, Failure> {
    match code {
        RABI_MODEL_FULL => Ok(Model::Full),
        RABI_MODEL_REDUCED => Ok(Model::Reduced),
        RABI_MODEL_EFFECTIVE => Ok(Model::Effective),
        _ => Err(fail(RabiStatus::InvalidArgument, format!("unknown model {code}"))),
    }
}

fn observable(code: u32) -> Result<Observable, Failure> {
    match code {
        RABI_POP_CL => Ok(Observable::PopCL),
        RABI_POP_CR => Ok(Observable::PopCR),
        RABI_POP_AL => Ok(Observable::PopAL),
        RABI_POP_AR => Ok(Observable::PopAR),
        RABI_POP_B => Ok(Observable::PopB),
        _ => Err(fail(RabiStatus::InvalidArgument, format!("unknown observable {code}"))),
    }
}

fn publish<T>(value: T, handle: &mut *mut T) {
    *handle = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rabi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a built-in parameter set (`RABI_PRESET_*`).
///
/// # Safety
/// `params` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_preset(preset: u32, params: *mut *mut RabiParams) -> RabiStatus {
    guard(|| {
        let handle = out(params, "params")?;
        *handle = ptr::null_mut();
        let p = match preset {
            RABI_PRESET_FIG2 => SystemParams::fig2(),
            RABI_PRESET_CASE_ONE => SystemParams::case_one(),
            RABI_PRESET_CASE_TWO => SystemParams::case_two(),
            _ => return Err(fail(RabiStatus::InvalidArgument, format!("unknown preset {preset}"))),
        };
        publish(RabiParams(p), handle);
        Ok(())
    })
}

/// Parses config-file text (`key = value` lines) into a parameter set.
/// Validation errors are reported as `InvalidConfig`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `params` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_from_config(
    text: *const c_char,
    params: *mut *mut RabiParams,
) -> RabiStatus {
    guard(|| {
        let handle = out(params, "params")?;
        *handle = ptr::null_mut();
        let p = RawConfig::parse(c_str(text, "text")?)?.resolve()?;
        check(&p)?;
        publish(RabiParams(p), handle);
        Ok(())
    })
}

fn check(p: &SystemParams) -> Result<(), Failure> {
    let report = validate(p);
    if report.has_errors() {
        let messages: Vec<String> = report.errors().map(|i| i.to_string()).collect();
        return Err(fail(RabiStatus::InvalidConfig, messages.join("; ")));
    }
    Ok(())
}

/// Copies a parameter set.
///
/// # Safety
/// `params` must be a live handle; `copy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_clone(
    params: *const RabiParams,
    copy: *mut *mut RabiParams,
) -> RabiStatus {
    guard(|| {
        let handle = out(copy, "copy")?;
        *handle = ptr::null_mut();
        let p = deref(params, "params")?.0;
        publish(RabiParams(p), handle);
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_free(params: *mut RabiParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Sets one config key. Frequencies are in rad/µs.
///
/// # Safety
/// `params` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_set(params: *mut RabiParams, key: *const c_char, value: f64) -> RabiStatus {
    guard(|| {
        let target = out(params, "params")?;
        let key = c_str(key, "key")?;
        let mut raw = RawConfig::from_params(&target.0, Units::RadPerUs);
        raw.set(key, value)?;
        target.0 = raw.resolve()?;
        Ok(())
    })
}

/// Reads one config key. Frequencies are in rad/µs.
///
/// # Safety
/// `params` must be a live handle, `key` a NUL-terminated string and `value`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_get(
    params: *const RabiParams,
    key: *const c_char,
    value: *mut f64,
) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let key = c_str(key, "key")?;
        let value = out(value, "value")?;
        let d = p.derived_detunings();
        *value = match key {
            "delta_L_prime" => d.delta_l_prime,
            "delta_R_prime" => d.delta_r_prime,
            "delta_L" => p.delta_l,
            "delta_R" => p.delta_r,
            "alpha" => p.alpha(),
            "alpha_L" => p.alpha_l,
            "alpha_R" => p.alpha_r,
            "beta" => p.beta,
            _ => RawConfig::from_params(p, Units::RadPerUs)
                .get(key)
                .ok_or_else(|| fail(RabiStatus::InvalidArgument, format!("unknown key '{key}'")))?,
        };
        Ok(())
    })
}

/// Validates the parameter set; fails with `InvalidConfig` listing every error.
/// `warnings` receives the number of non-fatal issues.
///
/// # Safety
/// `params` must be a live handle; `warnings` may be null.
#[no_mangle]
pub unsafe extern "C" fn rabi_params_validate(params: *const RabiParams, warnings: *mut u32) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        if let Some(w) = warnings.as_mut() {
            *w = validate(p).warnings().count() as u32;
        }
        check(p)
    })
}

/// # Safety
/// `params` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_effective(params: *const RabiParams, result: *mut RabiEffective) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let result = out(result, "result")?;
        let e = effective::effective_params(p)?;
        *result = RabiEffective {
            direct_coupling: e.direct_coupling,
            g_eff: e.g_eff.into(),
            g_bar_eff: e.g_bar_eff.into(),
            g_eff_r: e.g_eff_r,
            g_bar_eff_r: e.g_bar_eff_r,
            lambda: e.lambda,
            omega_m_tilde: e.omega_m_tilde,
            stark_detuning_l: e.stark_detuning_l,
            stark_detuning_r: e.stark_detuning_r,
            gamma_at_eff: e.gamma_at_eff,
            z_r: e.intermediates.z_r,
            antisymmetric: e.antisymmetric,
        };
        Ok(())
    })
}

/// Writes one of `RABI_REGIME_*`.
///
/// # Safety
/// `params` must be a live handle and `regime` writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_regime(params: *const RabiParams, regime: *mut u32) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let regime = out(regime, "regime")?;
        *regime = match effective::regime_classify(p)?.regime {
            Regime::CaseI => RABI_REGIME_CASE_I,
            Regime::CaseII => RABI_REGIME_CASE_II,
            Regime::Neither => RABI_REGIME_NEITHER,
        };
        Ok(())
    })
}

/// Integrates the model from an initial state given by the annihilation-mode
/// amplitudes `init[k]`, one per mode of the model in the order aL, aR, b,
/// cL, cR (full) or b, cL, cR (reduced, effective). Conjugates are implied.
///
/// # Safety
/// `params` must be a live handle, `init` must point to `n_init` values and
/// `trajectory` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_simulate(
    params: *const RabiParams,
    model_code: u32,
    method_code: u32,
    init: *const RabiComplex,
    n_init: usize,
    t_max: f64,
    dt_out: f64,
    trajectory: *mut *mut RabiTrajectory,
) -> RabiStatus {
    guard(|| {
        let handle = out(trajectory, "trajectory")?;
        *handle = ptr::null_mut();
        let p = &deref(params, "params")?.0;
        let model = model(model_code)?;
        let method = match method_code {
            RABI_METHOD_RK4 => Method::Rk4,
            RABI_METHOD_EXPM => Method::Expm,
            _ => return Err(fail(RabiStatus::InvalidArgument, format!("unknown method {method_code}"))),
        };
        let modes = model.modes();
        if n_init != modes.len() {
            return Err(fail(
                RabiStatus::InvalidArgument,
                format!("{model} model needs {} initial amplitudes, got {n_init}", modes.len()),
            ));
        }
        if init.is_null() {
            return Err(fail(RabiStatus::NullPointer, "init is null"));
        }
        let amplitudes = std::slice::from_raw_parts(init, n_init);

        let basis = model.basis();
        let mut x0 = vec![C64::new(0.0, 0.0); basis.len()];
        for (mode, a) in modes.iter().zip(amplitudes) {
            let v = C64::new(a.re, a.im);
            let label = Label::ann(*mode);
            for (k, l) in basis.iter().enumerate() {
                if *l == label {
                    x0[k] = v;
                } else if *l == label.adjoint() {
                    x0[k] = v.conj();
                }
            }
        }
        let drift = dynamics::build_drift(model, p)?;
        let traj = dynamics::integrate(&drift, &x0, t_max, dt_out, method)?;
        publish(RabiTrajectory(traj), handle);
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rabi_trajectory_free(trajectory: *mut RabiTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Number of samples.
///
/// # Safety
/// `trajectory` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_trajectory_len(trajectory: *const RabiTrajectory, len: *mut usize) -> RabiStatus {
    guard(|| {
        *out(len, "len")? = deref(trajectory, "trajectory")?.0.len();
        Ok(())
    })
}

unsafe fn fill(values: &[f64], buffer: *mut f64, capacity: usize) -> Result<(), Failure> {
    if buffer.is_null() {
        return Err(fail(RabiStatus::NullPointer, "buffer is null"));
    }
    if capacity < values.len() {
        return Err(fail(
            RabiStatus::BufferTooSmall,
            format!("buffer holds {capacity}, need {}", values.len()),
        ));
    }
    std::slice::from_raw_parts_mut(buffer, values.len()).copy_from_slice(values);
    Ok(())
}

/// Copies the sample times (µs) into `buffer`.
///
/// # Safety
/// `trajectory` must be a live handle and `buffer` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn rabi_trajectory_times(
    trajectory: *const RabiTrajectory,
    buffer: *mut f64,
    capacity: usize,
) -> RabiStatus {
    guard(|| fill(deref(trajectory, "trajectory")?.0.times(), buffer, capacity))
}

/// Copies |⟨δO⟩|² for one of `RABI_POP_*` into `buffer`. Fails with
/// `InvalidArgument` when the model lacks that mode.
///
/// # Safety
/// `trajectory` must be a live handle and `buffer` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn rabi_trajectory_population(
    trajectory: *const RabiTrajectory,
    observable_code: u32,
    buffer: *mut f64,
    capacity: usize,
) -> RabiStatus {
    guard(|| {
        let t = &deref(trajectory, "trajectory")?.0;
        let obs = observable(observable_code)?;
        let values = t
            .population(obs)
            .ok_or_else(|| fail(RabiStatus::InvalidArgument, format!("model has no {}", obs.name())))?;
        fill(&values, buffer, capacity)
    })
}

/// Mean spacing of the maxima of one population, µs.
///
/// # Safety
/// `trajectory` must be a live handle and `period` writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_trajectory_period(
    trajectory: *const RabiTrajectory,
    observable_code: u32,
    period: *mut f64,
) -> RabiStatus {
    guard(|| {
        let t = &deref(trajectory, "trajectory")?.0;
        let obs = observable(observable_code)?;
        *out(period, "period")? = dynamics::rabi_period(t, obs)?;
        Ok(())
    })
}

/// Eigenvalues of the 2×2 cavity-fluctuation matrix at radiation shift `r`.
///
/// # Safety
/// `params` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_cavity_stability(
    params: *const RabiParams,
    r: f64,
    lambda_plus: *mut RabiComplex,
    lambda_minus: *mut RabiComplex,
    stable: *mut bool,
) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let m = stability::stability_matrix(p, r)?;
        *out(lambda_plus, "lambda_plus")? = m.lambda_plus.into();
        *out(lambda_minus, "lambda_minus")? = m.lambda_minus.into();
        *out(stable, "stable")? = m.stable;
        Ok(())
    })
}

/// Radiation shift r of the classical steady state driven at `epsilon`.
///
/// # Safety
/// `params` must be a live handle and `r` writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_steady_state_shift(params: *const RabiParams, epsilon: f64, r: *mut f64) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        *out(r, "r")? = stability::classical_steady_state(p, epsilon)?.r;
        Ok(())
    })
}

/// Spectrum of the full 10×10 drift, most damped first. `eigenvalues` receives
/// `RABI_FULL_DIM` values, `cavity_weight` the cavity weight of the four most
/// damped eigenvectors.
///
/// # Safety
/// `params` must be a live handle; `eigenvalues` must hold `RABI_FULL_DIM`
/// values and `cavity_weight` four; `stable` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabi_spectrum_full(
    params: *const RabiParams,
    eigenvalues: *mut RabiComplex,
    cavity_weight: *mut f64,
    stable: *mut bool,
) -> RabiStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        if eigenvalues.is_null() || cavity_weight.is_null() {
            return Err(fail(RabiStatus::NullPointer, "output buffer is null"));
        }
        let report = stability::spectrum_full(p, 0.0)?;
        let ev = std::slice::from_raw_parts_mut(eigenvalues, RABI_FULL_DIM);
        for (slot, v) in ev.iter_mut().zip(&report.spectrum) {
            *slot = (*v).into();
        }
        fill(&report.cavity_dominance, cavity_weight, 4)?;
        *out(stable, "stable")? = report.stable;
        Ok(())
    })
}
