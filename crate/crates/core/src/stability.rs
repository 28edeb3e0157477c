//! Stability of the cavity fluctuations.
//!
//! Two routes are provided. The first treats the membrane and the ensembles
//! in mean field, solves for the classical steady state and examines the
//! 2×2 matrix M governing (δa_L, δa_R). The second diagonalizes the full
//! 10×10 drift, separates the four fastest-decaying (cavity-like) eigenvalues
//! and compares the remaining six with the reduced model.

use itertools::Itertools;
use nalgebra::{DVector, Matrix2};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dynamics::{build_full_drift, build_reduced_drift};
use crate::effective::effective_params;
use crate::eigen::{eigen, eigenvalues};
use crate::error::{Error, Result};
use crate::params::SystemParams;

const I: C64 = C64::new(0.0, 1.0);

pub const STEADY_STATE_TOL: f64 = 1e-10;
pub const STEADY_STATE_MAX_ITER: usize = 10_000;
const DAMPING: f64 = 0.5;
/// Minimum summed cavity weight for a fast eigenvector to count as cavity-like.
pub const CAVITY_DOMINANCE: f64 = 0.9;

/// Mean-field amplitudes of the cavity, membrane and ensemble modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalSteadyState {
    pub alpha_l: C64,
    pub alpha_r: C64,
    pub beta: C64,
    pub xi_l: C64,
    pub xi_r: C64,
    /// Radiation shift r = g₁⟨b + b†⟩.
    pub r: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl ClassicalSteadyState {
    /// 2g₁²ω_m(|α_L|² − |α_R|²)/(ω_m² + (γ_m/2)²).
    pub fn radiation_shift(&self, p: &SystemParams) -> f64 {
        radiation_shift(p, self.alpha_l.norm_sqr() - self.alpha_r.norm_sqr())
    }
}

fn radiation_shift(p: &SystemParams, imbalance: f64) -> f64 {
    2.0 * p.g1 * p.g1 * p.omega_m * imbalance / (p.omega_m.powi(2) + (0.5 * p.gamma_m).powi(2))
}

/// Time derivatives of (a_L, a_R, b, c_L, c_R) under the mean-field
/// Heisenberg equations with pump amplitude `epsilon`.
pub fn mean_field_rates(p: &SystemParams, epsilon: f64, s: &[C64; 5]) -> [C64; 5] {
    let [al, ar, b, cl, cr] = *s;
    let half_c = 0.5 * p.gamma_c;
    let position = b + b.conj();
    let g = p.g_coll;
    let dal = -I
        * ((p.delta_l - I * half_c) * al - p.tunnelling * ar - p.g1 * al * position + g * cl
            + epsilon);
    let dar = -I * ((p.delta_r - I * half_c) * ar - p.tunnelling * al + p.g1 * ar * position + g * cr);
    let db = -I * ((p.omega_m - I * 0.5 * p.gamma_m) * b - p.g1 * (al.norm_sqr() - ar.norm_sqr()));
    let dcl = -I * ((p.atom_detuning_l - I * 0.5 * p.gamma_at) * cl + g * al);
    let dcr = -I * ((p.atom_detuning_r - I * 0.5 * p.gamma_at) * cr + g * ar);
    [dal, dar, db, dcl, dcr]
}

/// Amplitudes consistent with a given membrane position ⟨b + b†⟩.
fn slave_to_position(p: &SystemParams, epsilon: f64, position: f64) -> [C64; 5] {
    let half_c = 0.5 * p.gamma_c;
    let g2 = p.g_coll * p.g_coll;
    let ens_l = p.atom_detuning_l - I * 0.5 * p.gamma_at;
    let ens_r = p.atom_detuning_r - I * 0.5 * p.gamma_at;
    let m11 = p.delta_l - I * half_c - p.g1 * position - g2 / ens_l;
    let m22 = p.delta_r - I * half_c + p.g1 * position - g2 / ens_r;
    let j = C64::from(p.tunnelling);
    // [m11 −J; −J m22] (α_L, α_R) = (−ε, 0)
    let det = m11 * m22 - j * j;
    let al = -epsilon * m22 / det;
    let ar = -epsilon * j / det;
    let beta = p.g1 * (al.norm_sqr() - ar.norm_sqr()) / (p.omega_m - I * 0.5 * p.gamma_m);
    let xi_l = -p.g_coll * al / ens_l;
    let xi_r = -p.g_coll * ar / ens_r;
    [al, ar, beta, xi_l, xi_r]
}

fn residual(p: &SystemParams, epsilon: f64, s: &[C64; 5]) -> f64 {
    mean_field_rates(p, epsilon, s)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

fn assemble(p: &SystemParams, s: [C64; 5], iterations: usize, residual: f64) -> ClassicalSteadyState {
    ClassicalSteadyState {
        alpha_l: s[0],
        alpha_r: s[1],
        beta: s[2],
        xi_l: s[3],
        xi_r: s[4],
        r: p.g1 * 2.0 * s[2].re,
        iterations,
        residual,
    }
}

/// Solves the mean-field steady state by damped fixed-point iteration on the
/// membrane position, falling back to a Newton iteration on the same scalar
/// if the damped iteration stalls.
pub fn classical_steady_state(p: &SystemParams, epsilon: f64) -> Result<ClassicalSteadyState> {
    if !epsilon.is_finite() {
        return Err(Error::Domain(format!("epsilon must be finite, got {epsilon}")));
    }
    // F(x) = 2 Re β(x); fixed point x = F(x)
    let image = |x: f64| 2.0 * slave_to_position(p, epsilon, x)[2].re;

    let mut x = 0.0;
    let mut best = (f64::INFINITY, x);
    let mut iterations = 0;
    while iterations < STEADY_STATE_MAX_ITER {
        let s = slave_to_position(p, epsilon, x);
        let res = residual(p, epsilon, &s);
        if res < best.0 {
            best = (res, x);
        }
        if res <= STEADY_STATE_TOL {
            return Ok(assemble(p, s, iterations, res));
        }
        let next = 2.0 * s[2].re;
        if !next.is_finite() {
            break;
        }
        x += DAMPING * (next - x);
        iterations += 1;
    }

    // Newton on f(x) = x − F(x) from the best point seen so far.
    x = best.1;
    for _ in 0..100 {
        let s = slave_to_position(p, epsilon, x);
        let res = residual(p, epsilon, &s);
        if res < best.0 {
            best = (res, x);
        }
        if res <= STEADY_STATE_TOL {
            return Ok(assemble(p, s, iterations, res));
        }
        let h = 1e-7 * x.abs().max(1e-7);
        let f = |x: f64| x - image(x);
        let slope = (f(x + h) - f(x - h)) / (2.0 * h);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        x -= f(x) / slope;
        iterations += 1;
    }

    let s = slave_to_position(p, epsilon, best.1);
    Err(Error::SteadyStateNotConverged(Box::new(assemble(
        p, s, iterations, best.0,
    ))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityStability {
    pub r: f64,
    #[serde(skip)]
    pub matrix: Matrix2<C64>,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    /// −γ_c/2 ± i√(J² + (δ_L − r)²), present when δ_L = −δ_R.
    pub closed_form: Option<(C64, C64)>,
    pub stable: bool,
}

/// M = [[−i(δ_L − r) − γ_c/2, iJ], [iJ, −i(δ_R + r) − γ_c/2]].
pub fn stability_matrix(p: &SystemParams, r: f64) -> Result<CavityStability> {
    let half = 0.5 * p.gamma_c;
    let j = I * p.tunnelling;
    let m = Matrix2::new(
        -I * (p.delta_l - r) - half,
        j,
        j,
        -I * (p.delta_r + r) - half,
    );
    let dm = nalgebra::DMatrix::from_iterator(2, 2, m.iter().copied());
    let mut ev = eigenvalues(&dm)?;
    ev.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());

    let closed_form = ((p.delta_l + p.delta_r).abs() <= crate::params::ANTISYMMETRY_TOL).then(|| {
        let w = (p.tunnelling.powi(2) + (p.delta_l - r).powi(2)).sqrt();
        (C64::new(-half, w), C64::new(-half, -w))
    });

    Ok(CavityStability {
        r,
        matrix: m,
        lambda_plus: ev[0],
        lambda_minus: ev[1],
        closed_form,
        stable: ev.iter().all(|v| v.re < 0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub cavity: CavityStability,
    /// The ten eigenvalues of the full drift, sorted by real part.
    pub spectrum: Vec<C64>,
    pub stable: bool,
    /// Indices into `spectrum` of the four most damped eigenvalues.
    pub fast_group: Vec<usize>,
    /// Summed squared cavity amplitude of each fast eigenvector.
    pub cavity_dominance: Vec<f64>,
    pub fast_group_cavity_dominated: bool,
    /// min |Re| of the fast group over max |Re| of the rest.
    pub spectral_gap: f64,
    /// Eigenvalues of the reduced drift, when the elimination is regular.
    pub reduced_spectrum: Option<Vec<C64>>,
    /// Worst relative deviation of the six slow eigenvalues from the reduced
    /// spectrum under the best one-to-one matching.
    pub slow_deviation: Option<f64>,
}

/// Spectrum of the full 10×10 drift together with the cavity-matrix analysis
/// at radiation shift `r`.
pub fn spectrum_full(p: &SystemParams, r: f64) -> Result<StabilityReport> {
    let drift = build_full_drift(p);
    let eig = eigen(drift.entries())?;

    let order: Vec<usize> = (0..eig.values.len())
        .sorted_by(|&a, &b| eig.values[a].re.partial_cmp(&eig.values[b].re).unwrap())
        .collect();
    let spectrum: Vec<C64> = order.iter().map(|&k| eig.values[k]).collect();
    let vectors: Vec<&DVector<C64>> = order.iter().map(|&k| &eig.vectors[k]).collect();

    let fast_group: Vec<usize> = (0..4.min(spectrum.len())).collect();
    let cavity_rows: Vec<usize> = drift
        .basis()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.mode.is_cavity())
        .map(|(i, _)| i)
        .collect();
    let cavity_dominance: Vec<f64> = fast_group
        .iter()
        .map(|&k| {
            let v = vectors[k];
            cavity_rows.iter().map(|&i| v[i].norm_sqr()).sum::<f64>() / v.norm_squared()
        })
        .collect();

    let slow: Vec<C64> = spectrum[fast_group.len()..].to_vec();
    let fast_min = fast_group
        .iter()
        .map(|&k| spectrum[k].re.abs())
        .fold(f64::INFINITY, f64::min);
    let slow_max = slow.iter().map(|v| v.re.abs()).fold(0.0, f64::max);

    let reduced_spectrum = match effective_params(p) {
        Ok(e) => Some(eigenvalues(build_reduced_drift(p, &e).entries())?),
        Err(Error::SingularElimination { .. }) => None,
        Err(err) => return Err(err),
    };
    let slow_deviation = reduced_spectrum
        .as_ref()
        .map(|reduced| best_matching_deviation(&slow, reduced));

    Ok(StabilityReport {
        cavity: stability_matrix(p, r)?,
        stable: spectrum.iter().all(|v| v.re < 0.0),
        fast_group_cavity_dominated: cavity_dominance.iter().all(|&w| w >= CAVITY_DOMINANCE),
        spectrum,
        fast_group,
        cavity_dominance,
        spectral_gap: fast_min / slow_max,
        reduced_spectrum,
        slow_deviation,
    })
}

/// Minimum over permutations of the maximum relative deviation |a − b|/|b|.
fn best_matching_deviation(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    (0..b.len())
        .permutations(b.len())
        .map(|perm| {
            a.iter()
                .zip(perm)
                .map(|(x, k)| (x - b[k]).norm() / b[k].norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}
