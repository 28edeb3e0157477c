//! Physical parameters of the membrane-in-the-middle cavity with two atomic
//! ensembles, in the rotating frame of the pump laser.
//!
//! All rates, detunings and couplings are angular frequencies in rad/µs and
//! times are in µs. The literature quotes everything as "2π × value MHz";
//! [`from_mhz`] and [`to_mhz`] convert between that convention and the
//! canonical unit.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ratio required between a "fast" and a "slow" scale before the adiabatic
/// hierarchy is considered satisfied.
pub const HIERARCHY_RATIO: f64 = 5.0;
/// Absolute slack (rad/µs) on the δ′_L = −δ′_R condition.
pub const ANTISYMMETRY_TOL: f64 = 1e-9;

/// `value` in units of 2π·MHz to rad/µs.
pub fn from_mhz(value: f64) -> f64 {
    value * TAU
}

/// rad/µs to units of 2π·MHz.
pub fn to_mhz(value: f64) -> f64 {
    value / TAU
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity amplitude decay rate, equal for both modes.
    pub gamma_c: f64,
    /// Ensemble decay rate, equal for both ensembles.
    pub gamma_at: f64,
    /// Mechanical dissipation rate.
    pub gamma_m: f64,
    /// Membrane frequency.
    pub omega_m: f64,
    /// Photon tunnelling rate J between the left and right cavity modes.
    pub tunnelling: f64,
    /// Single-photon optomechanical coupling.
    pub g1: f64,
    /// Collective atom-cavity coupling ḡ√N.
    pub g_coll: f64,
    /// Bare cavity-laser detunings δ_L, δ_R.
    pub delta_l: f64,
    pub delta_r: f64,
    /// Atom-laser detunings Δ_L, Δ_R.
    pub atom_detuning_l: f64,
    pub atom_detuning_r: f64,
    /// Classical cavity amplitudes (real).
    pub alpha_l: f64,
    pub alpha_r: f64,
    /// Classical membrane amplitude (real).
    pub beta: f64,
    /// Pump amplitude ε. Only the steady-state solver reads it.
    pub epsilon: f64,
    /// Thermal occupancy of the mechanical bath. Recorded, not propagated.
    pub n_th: f64,
}

impl SystemParams {
    /// Parameter set of the reference Rabi-oscillation simulation: γ_c = 2π·10,
    /// γ_at = 2π·0.01, γ_m = 2π·0.001, δ′_L = −δ′_R = −2π·100,
    /// ω_m = 2J = 2π·1000, g₁ = 2π·1, Δ = 2π·10, ḡ√N = 2π·10 (all MHz), α = 1.
    pub fn fig2() -> Self {
        Self {
            gamma_c: from_mhz(10.0),
            gamma_at: from_mhz(0.01),
            gamma_m: from_mhz(0.001),
            omega_m: from_mhz(1000.0),
            tunnelling: from_mhz(500.0),
            g1: from_mhz(1.0),
            g_coll: from_mhz(10.0),
            delta_l: from_mhz(-100.0),
            delta_r: from_mhz(100.0),
            atom_detuning_l: from_mhz(10.0),
            atom_detuning_r: from_mhz(10.0),
            alpha_l: 1.0,
            alpha_r: 1.0,
            beta: 0.0,
            epsilon: 0.0,
            n_th: 0.0,
        }
    }

    /// Transparent membrane at the Raman resonance 2J = ω_m, with a nearly
    /// vanishing classical cavity field (α = 10⁻³) and |δ′| = 2π·50 MHz.
    pub fn case_one() -> Self {
        Self {
            g_coll: from_mhz(6.3),
            delta_l: from_mhz(-50.0),
            delta_r: from_mhz(50.0),
            atom_detuning_l: from_mhz(5.0),
            atom_detuning_r: from_mhz(5.0),
            alpha_l: 1e-3,
            alpha_r: 1e-3,
            ..Self::fig2()
        }
    }

    /// Reflective membrane, J = 2π·0.1 MHz, α = 10.
    pub fn case_two() -> Self {
        Self {
            tunnelling: from_mhz(0.1),
            alpha_l: 10.0,
            alpha_r: 10.0,
            ..Self::case_one()
        }
    }

    /// The common classical cavity amplitude used by the effective model.
    pub fn alpha(&self) -> f64 {
        0.5 * (self.alpha_l + self.alpha_r)
    }

    /// Copy with every dissipation channel switched off.
    pub fn without_decay(&self) -> Self {
        Self {
            gamma_c: 0.0,
            gamma_at: 0.0,
            gamma_m: 0.0,
            ..*self
        }
    }

    /// Copy whose bare detunings are set so that the modified detunings equal
    /// `delta_l_prime`, `delta_r_prime` at the current β.
    pub fn with_modified_detunings(&self, delta_l_prime: f64, delta_r_prime: f64) -> Self {
        let shift = 2.0 * self.g1 * self.beta;
        Self {
            delta_l: delta_l_prime + shift,
            delta_r: delta_r_prime - shift,
            ..*self
        }
    }

    pub fn derived_detunings(&self) -> DerivedDetunings {
        derived_detunings(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedDetunings {
    pub delta_l_prime: f64,
    pub delta_r_prime: f64,
}

impl DerivedDetunings {
    pub fn is_antisymmetric(&self) -> bool {
        (self.delta_l_prime + self.delta_r_prime).abs() <= ANTISYMMETRY_TOL
    }
}

/// δ′_L = δ_L − 2g₁β, δ′_R = δ_R + 2g₁β.
pub fn derived_detunings(p: &SystemParams) -> DerivedDetunings {
    let shift = 2.0 * p.g1 * p.beta;
    DerivedDetunings {
        delta_l_prime: p.delta_l - shift,
        delta_r_prime: p.delta_r + shift,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    NonPositiveDecayRate,
    NonPositiveFrequency,
    NegativeCoupling,
    NegativeOccupancy,
    NonFinite,
    AdiabaticHierarchy,
    DetuningHierarchy,
    NotAntisymmetric,
    UnequalCavityAmplitudes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    pub fn contains(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }

    fn push(&mut self, severity: Severity, kind: IssueKind, message: String) {
        self.issues.push(Issue {
            severity,
            kind,
            message,
        });
    }
}

/// Checks hard invariants (errors) and the adiabatic-elimination regime
/// conditions (warnings). Never fails; severities are carried in the report.
pub fn validate(p: &SystemParams) -> ValidationReport {
    use IssueKind::*;
    use Severity::*;

    let mut report = ValidationReport::default();

    let fields = [
        ("gamma_c", p.gamma_c),
        ("gamma_at", p.gamma_at),
        ("gamma_m", p.gamma_m),
        ("omega_m", p.omega_m),
        ("J", p.tunnelling),
        ("g1", p.g1),
        ("g_coll", p.g_coll),
        ("delta_L", p.delta_l),
        ("delta_R", p.delta_r),
        ("Delta_L", p.atom_detuning_l),
        ("Delta_R", p.atom_detuning_r),
        ("alpha_L", p.alpha_l),
        ("alpha_R", p.alpha_r),
        ("beta", p.beta),
        ("epsilon", p.epsilon),
        ("n_th", p.n_th),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            report.push(Error, NonFinite, format!("{name} is not finite"));
        }
    }
    if report.has_errors() {
        return report;
    }

    for (name, rate) in [
        ("gamma_c", p.gamma_c),
        ("gamma_at", p.gamma_at),
        ("gamma_m", p.gamma_m),
    ] {
        if rate <= 0.0 {
            report.push(
                Error,
                NonPositiveDecayRate,
                format!("non-positive decay rate {name} = {rate}"),
            );
        }
    }
    if p.omega_m <= 0.0 {
        report.push(
            Error,
            NonPositiveFrequency,
            format!("non-positive mechanical frequency omega_m = {}", p.omega_m),
        );
    }
    for (name, value) in [("J", p.tunnelling), ("g1", p.g1), ("g_coll", p.g_coll)] {
        if value < 0.0 {
            report.push(Error, NegativeCoupling, format!("negative coupling {name} = {value}"));
        }
    }
    if p.n_th < 0.0 {
        report.push(Error, NegativeOccupancy, format!("negative thermal occupancy {}", p.n_th));
    }
    if report.has_errors() {
        return report;
    }

    let slowest = p.gamma_at.max(p.gamma_m);
    if p.gamma_c < HIERARCHY_RATIO * slowest {
        report.push(
            Warning,
            AdiabaticHierarchy,
            format!(
                "adiabatic hierarchy violated: gamma_c / max(gamma_at, gamma_m) = {:.3} < {HIERARCHY_RATIO}",
                p.gamma_c / slowest
            ),
        );
    }

    let d = derived_detunings(p);
    for (side, cavity, atom) in [
        ("L", d.delta_l_prime, p.atom_detuning_l),
        ("R", d.delta_r_prime, p.atom_detuning_r),
    ] {
        if cavity.abs() < HIERARCHY_RATIO * atom.abs() {
            report.push(
                Warning,
                DetuningHierarchy,
                format!(
                    "detuning hierarchy violated on {side}: |delta'| / |Delta| = {:.3} < {HIERARCHY_RATIO}",
                    cavity.abs() / atom.abs()
                ),
            );
        }
    }

    if !d.is_antisymmetric() {
        report.push(
            Warning,
            NotAntisymmetric,
            format!(
                "delta'_L + delta'_R = {:e} rad/us; the effective-Hamiltonian model requires delta'_L = -delta'_R",
                d.delta_l_prime + d.delta_r_prime
            ),
        );
    }

    if p.alpha_l != p.alpha_r {
        report.push(
            Warning,
            UnequalCavityAmplitudes,
            format!(
                "alpha_L = {} differs from alpha_R = {}; effective couplings use their mean",
                p.alpha_l, p.alpha_r
            ),
        );
    }

    report
}

/// ε = √(2γ_c P / ω_l) in a consistent unit system: `power` in ħ·(rad/µs)²
/// (i.e. P/ħ), rates in rad/µs.
pub fn pump_amplitude(power: f64, gamma_c: f64, omega_l: f64) -> Result<f64> {
    if !(gamma_c > 0.0) {
        return Err(Error::Domain(format!("gamma_c must be positive, got {gamma_c}")));
    }
    if !(omega_l > 0.0) {
        return Err(Error::Domain(format!("omega_l must be positive, got {omega_l}")));
    }
    if !(power >= 0.0) {
        return Err(Error::Domain(format!("power must be non-negative, got {power}")));
    }
    Ok((2.0 * gamma_c * power / omega_l).sqrt())
}

/// Pump amplitude for a laser power given in watts. `gamma_c` and `omega_l`
/// are in rad/µs, the result in rad/µs.
///
/// The drive term ε(a† + a) is normalised to the photon flux P/(ħω_l), so
/// ε² = 2γ_c P/(ħω_l) with every quantity in SI before converting back.
pub fn pump_amplitude_si(power_watts: f64, gamma_c: f64, omega_l: f64) -> Result<f64> {
    // rad/µs -> rad/s is ×1e6; P/ħ then carries units of rad/s².
    let eps_si = pump_amplitude(power_watts / HBAR, gamma_c * 1e6, omega_l * 1e6)?;
    Ok(eps_si * 1e-6)
}

/// Laser angular frequency (rad/µs) for a vacuum wavelength in metres.
pub fn laser_angular_frequency(wavelength_m: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {wavelength_m}")));
    }
    Ok(TAU * SPEED_OF_LIGHT / wavelength_m * 1e-6)
}

/// Bose-Einstein occupancy n̄ = 1/(exp(ħω_m/k_B T) − 1) with ω_m in rad/µs
/// and T in kelvin.
pub fn thermal_occupancy(omega_m: f64, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be non-negative, got {temperature}")));
    }
    if !(omega_m > 0.0) {
        return Err(Error::Domain(format!("omega_m must be positive, got {omega_m}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_m * 1e6 / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Temperature (K) at which ħω_m / k_B T equals `ratio`.
pub fn temperature_for_ratio(omega_m: f64, ratio: f64) -> f64 {
    HBAR * omega_m * 1e6 / (K_B * ratio)
}
