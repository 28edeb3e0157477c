//! Adiabatic elimination of the cavity fluctuations and the resulting
//! effective couplings between the membrane and the two ensembles.
//!
//! With x = iγ_c/2 − δ′_L, y = iγ_c/2 − δ′_R and z = xy − J², the eliminated
//! cavity modes produce a mechanical squeezing term Λ, membrane-ensemble
//! couplings G_eff and Ḡ_eff, Stark shifts of the ensembles and a direct,
//! tunnelling-mediated ensemble-ensemble coupling C.
//!
//! The real-part quantities (superscript R in the usual notation) use
//! |z_R| with z_R = Re(z). In the antisymmetric configuration δ′_L = −δ′_R
//! this is z_R = −(γ_c²/4 + δ′_L² + J²). A second value with γ_c²/2 in place
//! of γ_c²/4 is carried as [`EliminationIntermediates::z_r_printed`] so the
//! two conventions can be compared; it never enters any coupling.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dynamics::{Label, Model};
use crate::error::{Error, Result};
use crate::params::{derived_detunings, SystemParams};

/// Below this |z| the elimination is singular.
pub const SINGULAR_Z: f64 = 1e-12;
/// Relative window around 2J = ω_m accepted as Raman resonant.
pub const RAMAN_WINDOW: f64 = 0.05;
/// J/|δ′_L| at or below which the membrane counts as reflective.
pub const REFLECTIVE_RATIO: f64 = 0.05;
/// Factor by which g₁α must exceed ḡ√N·J/|δ′_L| for membrane-mediated coupling.
pub const DOMINANCE_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EliminationIntermediates {
    pub x: C64,
    pub y: C64,
    pub z: C64,
    /// Re(z).
    pub z_r: f64,
    /// −(γ_c²/2 + δ′_L² + J²).
    pub z_r_printed: f64,
}

impl EliminationIntermediates {
    /// Relative difference between the two z_R conventions.
    pub fn z_r_discrepancy(&self) -> f64 {
        ((self.z_r_printed - self.z_r) / self.z_r).abs()
    }
}

pub fn elimination_intermediates(p: &SystemParams) -> Result<EliminationIntermediates> {
    let d = derived_detunings(p);
    let half_gamma = C64::new(0.0, 0.5 * p.gamma_c);
    let x = half_gamma - d.delta_l_prime;
    let y = half_gamma - d.delta_r_prime;
    let z = x * y - p.tunnelling * p.tunnelling;
    if !(z.norm() >= SINGULAR_Z) {
        return Err(Error::SingularElimination {
            magnitude: z.norm(),
        });
    }
    let z_r_printed = -(0.5 * p.gamma_c * p.gamma_c
        + d.delta_l_prime * d.delta_l_prime
        + p.tunnelling * p.tunnelling);
    Ok(EliminationIntermediates {
        x,
        y,
        z,
        z_r: z.re,
        z_r_printed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveParams {
    /// Λ = g₁²α² Re((x + y − 2J)/z).
    pub lambda: f64,
    /// ω̃_m = ω_m + Λ.
    pub omega_m_tilde: f64,
    /// G_eff = g₁ḡ√N (α/z)(y − J).
    pub g_eff: C64,
    /// Ḡ_eff = g₁ḡ√N (α/z)(x − J).
    pub g_bar_eff: C64,
    /// g₁ḡ√N (α/|z_R|)(δ′_R + J).
    pub g_eff_r: f64,
    /// g₁ḡ√N (α/|z_R|)(δ′_L + J).
    pub g_bar_eff_r: f64,
    /// Complex ensemble detunings Δ′_L = Δ_L − ḡ²N y/z, Δ′_R = Δ_R − ḡ²N x/z.
    pub detuning_l: C64,
    pub detuning_r: C64,
    /// Real Stark-shifted detunings Δ_L − ḡ²N δ′_R/|z_R|, Δ_R − ḡ²N δ′_L/|z_R|.
    pub stark_detuning_l: f64,
    pub stark_detuning_r: f64,
    /// Complex ensemble cross coefficient ḡ²N J/z.
    pub cross_coupling: C64,
    /// C = −ḡ²N J/|z_R|.
    pub direct_coupling: f64,
    /// γ′_at = γ_at − ḡ²N γ_c/|z_R|.
    pub gamma_at_eff: f64,
    /// Whether δ′_L = −δ′_R held when these were computed.
    pub antisymmetric: bool,
    pub intermediates: EliminationIntermediates,
}

impl EffectiveParams {
    /// Λ in its antisymmetric closed form 2α²g₁²J/|z_R|.
    pub fn lambda_antisymmetric(&self, p: &SystemParams) -> f64 {
        let alpha = p.alpha();
        2.0 * alpha * alpha * p.g1 * p.g1 * p.tunnelling / self.intermediates.z_r.abs()
    }
}

pub fn effective_params(p: &SystemParams) -> Result<EffectiveParams> {
    let im = elimination_intermediates(p)?;
    let d = derived_detunings(p);
    let (x, y, z) = (im.x, im.y, im.z);
    let j = p.tunnelling;
    let alpha = p.alpha();
    let g2n = p.g_coll * p.g_coll;
    let z_r_abs = im.z_r.abs();

    let lambda = p.g1 * p.g1 * alpha * alpha * ((x + y - 2.0 * j) / z).re;
    let pref = p.g1 * p.g_coll * alpha;
    Ok(EffectiveParams {
        lambda,
        omega_m_tilde: p.omega_m + lambda,
        g_eff: pref * (y - j) / z,
        g_bar_eff: pref * (x - j) / z,
        g_eff_r: pref * (d.delta_r_prime + j) / z_r_abs,
        g_bar_eff_r: pref * (d.delta_l_prime + j) / z_r_abs,
        detuning_l: p.atom_detuning_l - g2n * y / z,
        detuning_r: p.atom_detuning_r - g2n * x / z,
        stark_detuning_l: p.atom_detuning_l - g2n * d.delta_r_prime / z_r_abs,
        stark_detuning_r: p.atom_detuning_r - g2n * d.delta_l_prime / z_r_abs,
        cross_coupling: g2n * j / z,
        direct_coupling: -g2n * j / z_r_abs,
        gamma_at_eff: p.gamma_at - g2n * p.gamma_c / z_r_abs,
        antisymmetric: d.is_antisymmetric(),
        intermediates: im,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Transparent membrane at Raman resonance; the direct coupling C dominates.
    CaseI,
    /// Reflective membrane; the membrane-mediated coupling dominates.
    CaseII,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamanSplitting {
    /// |ω₊ − ω₋| = 2J.
    pub splitting: f64,
    /// |2J − ω_m| / ω_m.
    pub deviation: f64,
    pub resonant: bool,
}

pub fn raman_splitting(p: &SystemParams) -> RamanSplitting {
    let splitting = 2.0 * p.tunnelling;
    let deviation = (splitting - p.omega_m).abs() / p.omega_m;
    RamanSplitting {
        splitting,
        deviation,
        resonant: deviation <= RAMAN_WINDOW,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub raman: RamanSplitting,
    /// |C|.
    pub direct_coupling: f64,
    /// max(|G^R_eff|, |Ḡ^R_eff|).
    pub membrane_coupling: f64,
    /// |C| / max(|G^R_eff|, |Ḡ^R_eff|).
    pub direct_dominance: f64,
    /// J / |δ′_L|.
    pub tunnelling_ratio: f64,
    /// g₁α / (ḡ√N J/|δ′_L|); infinite when the right-hand side vanishes.
    pub membrane_ratio: f64,
}

pub fn regime_classify(p: &SystemParams) -> Result<RegimeReport> {
    let e = effective_params(p)?;
    let raman = raman_splitting(p);
    let d = derived_detunings(p);

    let c = e.direct_coupling.abs();
    let g = e.g_eff_r.abs().max(e.g_bar_eff_r.abs());
    let tunnelling_ratio = p.tunnelling / d.delta_l_prime.abs();
    let threshold = p.g_coll * tunnelling_ratio;
    let drive = p.g1 * p.alpha().abs();

    let regime = if raman.resonant && c > g {
        Regime::CaseI
    } else if tunnelling_ratio <= REFLECTIVE_RATIO && drive >= DOMINANCE_FACTOR * threshold {
        Regime::CaseII
    } else {
        Regime::Neither
    };

    Ok(RegimeReport {
        regime,
        raman,
        direct_coupling: c,
        membrane_coupling: g,
        direct_dominance: c / g,
        tunnelling_ratio,
        membrane_ratio: drive / threshold,
    })
}

/// Quadratic form H = ½ v†𝓗v over a drift basis v, with 𝓗 Hermitian.
///
/// The Heisenberg drift generated by H is −iK𝓗 where K = diag(±1) is +1 on
/// annihilation and −1 on creation labels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub basis: Vec<Label>,
    pub matrix: DMatrix<C64>,
}

impl QuadraticForm {
    /// max|𝓗 − 𝓗†| / max|𝓗|.
    pub fn hermiticity_residual(&self) -> f64 {
        let scale = self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale
    }

    /// Value of the form on a mean-field state (real for conjugate-paired states).
    pub fn energy(&self, state: &[C64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(state);
        0.5 * (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }

    pub fn entry(&self, row: Label, col: Label) -> C64 {
        let i = self.index(row);
        let j = self.index(col);
        self.matrix[(i, j)]
    }

    fn index(&self, label: Label) -> usize {
        self.basis
            .iter()
            .position(|&l| l == label)
            .expect("label not in basis")
    }
}

/// Coefficients of the effective Hamiltonian over (δb, δb†, δc_L, δc_L†,
/// δc_R, δc_R†).
pub fn effective_hamiltonian_coefficients(e: &EffectiveParams) -> Result<QuadraticForm> {
    use crate::dynamics::Mode::*;

    if !e.antisymmetric {
        return Err(Error::InvalidModel(
            "the effective Hamiltonian requires delta'_L = -delta'_R".into(),
        ));
    }
    let basis = Model::Effective.basis();
    let mut form = QuadraticForm {
        matrix: DMatrix::zeros(basis.len(), basis.len()),
        basis,
    };
    let idx = |label: Label| form.index(label);
    let b = [idx(Label::ann(Mechanical)), idx(Label::cre(Mechanical))];
    let cl = [idx(Label::ann(EnsembleL)), idx(Label::cre(EnsembleL))];
    let cr = [idx(Label::ann(EnsembleR)), idx(Label::cre(EnsembleR))];
    let m = &mut form.matrix;

    for &(pair, diag) in &[
        (b, e.omega_m_tilde),
        (cl, e.stark_detuning_l),
        (cr, e.stark_detuning_r),
    ] {
        m[(pair[0], pair[0])] = C64::from(diag);
        m[(pair[1], pair[1])] = C64::from(diag);
    }

    // (Λ/2)(δb†² + δb²)
    if e.lambda != 0.0 {
        m[(b[0], b[1])] = C64::from(e.lambda);
        m[(b[1], b[0])] = C64::from(e.lambda);
    }

    // (G(δc_L + δc_L†) − Ḡ(δc_R + δc_R†))(δb + δb†)
    for (pair, g) in [(cl, e.g_eff_r), (cr, -e.g_bar_eff_r)] {
        if g == 0.0 {
            continue;
        }
        for &i in &pair {
            for &k in &b {
                m[(i, k)] = C64::from(g);
                m[(k, i)] = C64::from(g);
            }
        }
    }

    // −C(δc_L δc_R† + δc_R δc_L†)
    let c = C64::from(-e.direct_coupling);
    if e.direct_coupling != 0.0 {
        m[(cl[0], cr[0])] = c;
        m[(cr[0], cl[0])] = c;
        m[(cl[1], cr[1])] = c;
        m[(cr[1], cl[1])] = c;
    }

    Ok(form)
}
