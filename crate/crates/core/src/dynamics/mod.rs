//! Linear drift matrices for the mean fluctuation dynamics.
//!
//! Three models share one state convention: the expectation value of every
//! fluctuation operator and of its adjoint are carried as separate components,
//! ordered as (O, O†) pairs. A physical state is conjugate-paired: the entry
//! for O† is the complex conjugate of the entry for O.
//!
//! * [`Model::Full`] keeps both cavity modes (10×10).
//! * [`Model::Reduced`] uses the adiabatically eliminated equations with the
//!   complex coefficients x, y, z retained (6×6).
//! * [`Model::Effective`] is the Heisenberg drift of the effective Hamiltonian
//!   with phenomenological decays γ′_at/2 and γ_m/2 (6×6).

mod integrate;
mod trajectory;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::effective::{effective_hamiltonian_coefficients, effective_params, EffectiveParams};
use crate::error::{Error, Result};
use crate::params::{derived_detunings, SystemParams};

pub use integrate::{default_step, integrate, propagator, Method};
pub use trajectory::{compare, rabi_period, Difference, Observable, Trajectory};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    CavityL,
    CavityR,
    Mechanical,
    EnsembleL,
    EnsembleR,
}

impl Mode {
    pub fn symbol(self) -> &'static str {
        match self {
            Mode::CavityL => "aL",
            Mode::CavityR => "aR",
            Mode::Mechanical => "b",
            Mode::EnsembleL => "cL",
            Mode::EnsembleR => "cR",
        }
    }

    pub fn is_cavity(self) -> bool {
        matches!(self, Mode::CavityL | Mode::CavityR)
    }
}

/// A fluctuation operator δO (`dagger == false`) or its adjoint δO†.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Label {
    pub mode: Mode,
    pub dagger: bool,
}

impl Label {
    pub const fn ann(mode: Mode) -> Self {
        Self { mode, dagger: false }
    }

    pub const fn cre(mode: Mode) -> Self {
        Self { mode, dagger: true }
    }

    pub fn adjoint(self) -> Self {
        Self {
            dagger: !self.dagger,
            ..self
        }
    }

    /// +1 on annihilation labels, −1 on creation labels.
    pub fn metric(self) -> f64 {
        if self.dagger {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mode.symbol())?;
        if self.dagger {
            f.write_str("dag")?;
        }
        Ok(())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (base, dagger) = match s.strip_suffix("dag") {
            Some(base) => (base, true),
            None => (s, false),
        };
        let mode = match base {
            "aL" => Mode::CavityL,
            "aR" => Mode::CavityR,
            "b" => Mode::Mechanical,
            "cL" => Mode::EnsembleL,
            "cR" => Mode::EnsembleR,
            _ => return Err(format!("unknown label '{s}'")),
        };
        Ok(Label { mode, dagger })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Full,
    Reduced,
    Effective,
}

impl Model {
    pub fn modes(self) -> &'static [Mode] {
        use Mode::*;
        match self {
            Model::Full => &[CavityL, CavityR, Mechanical, EnsembleL, EnsembleR],
            Model::Reduced | Model::Effective => &[Mechanical, EnsembleL, EnsembleR],
        }
    }

    pub fn basis(self) -> Vec<Label> {
        self.modes()
            .iter()
            .flat_map(|&m| [Label::ann(m), Label::cre(m)])
            .collect()
    }

    pub fn dim(self) -> usize {
        2 * self.modes().len()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Full => "full",
            Model::Reduced => "reduced",
            Model::Effective => "effective",
        })
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Model::Full),
            "reduced" => Ok(Model::Reduced),
            "effective" => Ok(Model::Effective),
            _ => Err(format!("unknown model '{s}' (expected full, reduced or effective)")),
        }
    }
}

/// Coefficient matrix of ẋ = Mx over a labelled basis, in rad/µs.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    basis: Vec<Label>,
    entries: DMatrix<C64>,
}

impl DriftMatrix {
    pub fn new(basis: Vec<Label>, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != basis.len() || entries.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                actual: entries.nrows(),
            });
        }
        Ok(Self { basis, entries })
    }

    fn zeros(model: Model) -> Self {
        let basis = model.basis();
        let n = basis.len();
        Self {
            basis,
            entries: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Label] {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.basis.iter().position(|&l| l == label)
    }

    pub fn entry(&self, row: Label, col: Label) -> C64 {
        match (self.index_of(row), self.index_of(col)) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Index of the adjoint partner of every basis element.
    pub fn pairing(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|l| self.index_of(l.adjoint()).expect("basis closed under adjoint"))
            .collect()
    }

    /// max over rows of |M[O†, P] − conj(M[O, P†])|.
    pub fn conjugate_pairing_residual(&self) -> f64 {
        let pair = self.pairing();
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = self.entries[(pair[i], pair[j])] - self.entries[(i, j)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Diagonal metric K: +1 on annihilation labels, −1 on creation labels.
    pub fn metric(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|l| C64::from(l.metric())),
        ))
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn set(&mut self, row: Label, col: Label, value: C64) {
        let i = self.index_of(row).expect("row label");
        let j = self.index_of(col).expect("column label");
        self.entries[(i, j)] = value;
    }

    fn add(&mut self, row: Label, col: Label, value: C64) {
        let i = self.index_of(row).expect("row label");
        let j = self.index_of(col).expect("column label");
        self.entries[(i, j)] += value;
    }

    /// Fills every O† row from its O row by conjugation.
    fn complete_adjoint_rows(&mut self) {
        let pair = self.pairing();
        let n = self.dim();
        for (i, label) in self.basis.clone().into_iter().enumerate() {
            if label.dagger {
                continue;
            }
            for j in 0..n {
                self.entries[(pair[i], pair[j])] = self.entries[(i, j)].conj();
            }
        }
    }
}

/// Drift of the five linearized Langevin equations with equal cavity decays,
/// noise means set to zero.
///
/// The right-mode equation carries −ig₁α_R(δb + δb†), following the general
/// unequal-amplitude form.
pub fn build_full_drift(p: &SystemParams) -> DriftMatrix {
    use Mode::*;
    let d = derived_detunings(p);
    let mut m = DriftMatrix::zeros(Model::Full);
    let (al, ar, b, cl, cr) = (
        Label::ann(CavityL),
        Label::ann(CavityR),
        Label::ann(Mechanical),
        Label::ann(EnsembleL),
        Label::ann(EnsembleR),
    );
    let g = p.g_coll;
    let j = p.tunnelling;

    for (a, other, c, delta, alpha, sign) in [
        (al, ar, cl, d.delta_l_prime, p.alpha_l, 1.0),
        (ar, al, cr, d.delta_r_prime, p.alpha_r, -1.0),
    ] {
        m.set(a, a, -(0.5 * p.gamma_c + I * delta));
        m.set(a, c, -I * g);
        m.add(a, other, I * j);
        m.add(a, b, sign * I * p.g1 * alpha);
        m.add(a, b.adjoint(), sign * I * p.g1 * alpha);
    }

    m.set(b, b, -(0.5 * p.gamma_m + I * p.omega_m));
    for (a, alpha, sign) in [(al, p.alpha_l, 1.0), (ar, p.alpha_r, -1.0)] {
        m.add(b, a, sign * I * p.g1 * alpha);
        m.add(b, a.adjoint(), sign * I * p.g1 * alpha);
    }

    for (c, a, delta) in [
        (cl, al, p.atom_detuning_l),
        (cr, ar, p.atom_detuning_r),
    ] {
        m.set(c, c, -(0.5 * p.gamma_at + I * delta));
        m.set(c, a, -I * g);
    }

    m.complete_adjoint_rows();
    m
}

/// Drift of the Langevin equations for δb, δc_L, δc_R after adiabatic
/// elimination of the cavity, with complex x, y, z kept in full.
pub fn build_reduced_drift(p: &SystemParams, e: &EffectiveParams) -> DriftMatrix {
    use Mode::*;
    let mut m = DriftMatrix::zeros(Model::Reduced);
    let (b, cl, cr) = (
        Label::ann(Mechanical),
        Label::ann(EnsembleL),
        Label::ann(EnsembleR),
    );

    m.set(b, b, -I * e.omega_m_tilde - 0.5 * p.gamma_m);
    m.set(b, b.adjoint(), -I * e.lambda);
    // −i(G δc_L + h.c.) + i(Ḡ δc_R + h.c.)
    m.set(b, cl, -I * e.g_eff);
    m.set(b, cl.adjoint(), -I * e.g_eff.conj());
    m.set(b, cr, I * e.g_bar_eff);
    m.set(b, cr.adjoint(), I * e.g_bar_eff.conj());

    m.set(cl, cl, -I * e.detuning_l - 0.5 * p.gamma_at);
    m.set(cl, b, -I * e.g_eff);
    m.add(cl, b.adjoint(), -I * e.g_eff);
    m.set(cl, cr, I * e.cross_coupling);

    m.set(cr, cr, -I * e.detuning_r - 0.5 * p.gamma_at);
    m.set(cr, b, I * e.g_bar_eff);
    m.add(cr, b.adjoint(), I * e.g_bar_eff);
    m.set(cr, cl, I * e.cross_coupling);

    m.complete_adjoint_rows();
    m
}

/// Heisenberg drift of the effective Hamiltonian plus decays γ′_at/2 on the
/// ensembles and γ_m/2 on the membrane.
pub fn build_effective_drift(e: &EffectiveParams, p: &SystemParams) -> Result<DriftMatrix> {
    let form = effective_hamiltonian_coefficients(e)?;
    let metric: Vec<f64> = form.basis.iter().map(|l| l.metric()).collect();
    let n = form.basis.len();
    let mut entries = DMatrix::from_fn(n, n, |i, j| -I * metric[i] * form.matrix[(i, j)]);
    for (i, label) in form.basis.iter().enumerate() {
        let rate = match label.mode {
            Mode::Mechanical => p.gamma_m,
            _ => e.gamma_at_eff,
        };
        entries[(i, i)] -= 0.5 * rate;
    }
    DriftMatrix::new(form.basis, entries)
}

/// Builds the drift for `model`, computing the effective parameters as needed.
pub fn build_drift(model: Model, p: &SystemParams) -> Result<DriftMatrix> {
    match model {
        Model::Full => Ok(build_full_drift(p)),
        Model::Reduced => Ok(build_reduced_drift(p, &effective_params(p)?)),
        Model::Effective => build_effective_drift(&effective_params(p)?, p),
    }
}

/// Conjugate-paired state with ⟨δO⟩ = `value` for the given annihilation
/// label and zero elsewhere.
pub fn excitation(model: Model, mode: Mode, value: C64) -> Vec<C64> {
    let basis = model.basis();
    basis
        .iter()
        .map(|&l| {
            if l == Label::ann(mode) {
                value
            } else if l == Label::cre(mode) {
                value.conj()
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}
