use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{DriftMatrix, Trajectory};
use crate::error::{Error, Result};

/// Upper bound on the RK4 step, µs.
const MAX_STEP: f64 = 1e-3;
/// Target value of h·‖M‖∞ for RK4.
const STEP_SCALE: f64 = 0.01;
/// Allowed conjugate-pairing mismatch of an initial state, relative to its size.
const PAIRING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4,
    /// Matrix-exponential propagator exp(M·dt_out) applied repeatedly.
    Expm,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "expm" => Ok(Method::Expm),
            _ => Err(format!("unknown method '{s}' (expected rk4 or expm)")),
        }
    }
}

/// RK4 step: min(10⁻³ µs, 0.01/‖M‖∞).
pub fn default_step(m: &DriftMatrix) -> f64 {
    let norm = m.norm_inf();
    if norm > 0.0 {
        MAX_STEP.min(STEP_SCALE / norm)
    } else {
        MAX_STEP
    }
}

/// exp(M t).
pub fn propagator(m: &DriftMatrix, t: f64) -> DMatrix<C64> {
    (m.entries() * C64::from(t)).exp()
}

/// Integrates ẋ = Mx from `x0`, sampling every `dt_out` up to `t_max`.
pub fn integrate(
    m: &DriftMatrix,
    x0: &[C64],
    t_max: f64,
    dt_out: f64,
    method: Method,
) -> Result<Trajectory> {
    check_initial_state(m, x0)?;
    if !(dt_out > 0.0) || !dt_out.is_finite() {
        return Err(Error::Domain(format!("dt_out must be positive, got {dt_out}")));
    }
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be non-negative, got {t_max}")));
    }

    let samples = (t_max / dt_out + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=samples).map(|k| k as f64 * dt_out).collect();
    let mut states = Vec::with_capacity(times.len());
    states.push(x0.to_vec());

    match method {
        Method::Expm => {
            let step = propagator(m, dt_out);
            let mut x = DVector::from_column_slice(x0);
            for _ in 0..samples {
                x = &step * &x;
                states.push(x.as_slice().to_vec());
            }
        }
        Method::Rk4 => {
            let substeps = (dt_out / default_step(m)).ceil().max(1.0) as usize;
            let h = dt_out / substeps as f64;
            let mut stepper = Rk4::new(m, h);
            let mut x = x0.to_vec();
            for _ in 0..samples {
                for _ in 0..substeps {
                    stepper.step(&mut x);
                }
                states.push(x.clone());
            }
        }
    }

    Ok(Trajectory::new(m.basis().to_vec(), times, states))
}

fn check_initial_state(m: &DriftMatrix, x0: &[C64]) -> Result<()> {
    if x0.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            actual: x0.len(),
        });
    }
    let residual = m.conjugate_pairing_residual();
    if !(residual <= PAIRING_TOL * m.norm_inf().max(1.0)) {
        return Err(Error::InvalidModel(format!(
            "drift matrix is not conjugate-paired (residual {residual:e})"
        )));
    }
    let scale = x0.iter().map(|v| v.norm()).fold(1.0, f64::max);
    for (i, &j) in m.pairing().iter().enumerate() {
        let residual = (x0[j] - x0[i].conj()).norm();
        if !(residual <= PAIRING_TOL * scale) {
            return Err(Error::NotConjugatePaired {
                label: m.basis()[i].to_string(),
                residual,
            });
        }
    }
    Ok(())
}

/// Fixed-step RK4. For ẋ = Mx one step is exactly x ← Rx with
/// R = I + hM + (hM)²/2 + (hM)³/6 + (hM)⁴/24, which is formed once. R keeps
/// the conjugate pairing of M, so only the annihilation rows are evaluated.
struct Rk4 {
    /// (row index, conjugate row index, row of R)
    rows: Vec<(usize, usize, Vec<C64>)>,
    next: Vec<C64>,
}

impl Rk4 {
    fn new(m: &DriftMatrix, h: f64) -> Self {
        let n = m.dim();
        let a = m.entries() * C64::from(h);
        let id = DMatrix::<C64>::identity(n, n);
        let mut r = id.clone();
        for k in [4.0, 3.0, 2.0, 1.0] {
            r = &id + &a * r / C64::from(k);
        }
        let pairing = m.pairing();
        let rows = (0..n)
            .filter(|&i| !m.basis()[i].dagger)
            .map(|i| (i, pairing[i], r.row(i).iter().copied().collect()))
            .collect();
        Self {
            rows,
            next: vec![C64::new(0.0, 0.0); n],
        }
    }

    fn step(&mut self, x: &mut [C64]) {
        for (i, j, row) in &self.rows {
            let v: C64 = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            self.next[*i] = v;
            self.next[*j] = v.conj();
        }
        x.copy_from_slice(&self.next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_drift, excitation, Mode, Model};
    use crate::params::SystemParams;

    #[test]
    fn zero_state_stays_zero() {
        let m = build_drift(Model::Full, &SystemParams::fig2()).unwrap();
        let x0 = vec![C64::new(0.0, 0.0); 10];
        let traj = integrate(&m, &x0, 0.5, 0.1, Method::Rk4).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(traj.states().iter().flatten().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn rejects_bad_initial_states() {
        let m = build_drift(Model::Reduced, &SystemParams::fig2()).unwrap();
        assert!(matches!(
            integrate(&m, &[C64::new(1.0, 0.0); 4], 1.0, 0.1, Method::Rk4),
            Err(Error::DimensionMismatch { expected: 6, actual: 4 })
        ));
        let mut x0 = excitation(Model::Reduced, Mode::EnsembleL, C64::new(1.0, 0.5));
        x0[3] = C64::new(1.0, 0.5);
        assert!(matches!(
            integrate(&m, &x0, 1.0, 0.1, Method::Rk4),
            Err(Error::NotConjugatePaired { .. })
        ));
    }

    #[test]
    fn rk4_matches_propagator_on_short_run() {
        let m = build_drift(Model::Effective, &SystemParams::fig2()).unwrap();
        let x0 = excitation(Model::Effective, Mode::EnsembleL, C64::new(1.0, 0.0));
        let a = integrate(&m, &x0, 1.0, 0.05, Method::Rk4).unwrap();
        let b = integrate(&m, &x0, 1.0, 0.05, Method::Expm).unwrap();
        for (sa, sb) in a.states().iter().zip(b.states()) {
            for (u, v) in sa.iter().zip(sb) {
                assert!((u - v).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_unpaired_drift() {
        let basis = Model::Effective.basis();
        let mut a = DMatrix::zeros(6, 6);
        a[(0, 0)] = C64::new(0.0, -1.0);
        let m = DriftMatrix::new(basis, a).unwrap();
        let x0 = vec![C64::new(0.0, 0.0); 6];
        assert!(matches!(
            integrate(&m, &x0, 1.0, 0.1, Method::Rk4),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn step_rule() {
        let m = build_drift(Model::Full, &SystemParams::fig2()).unwrap();
        let h = default_step(&m);
        assert!(h < 1e-3);
        assert!((h * m.norm_inf() - 0.01).abs() < 1e-12);
    }
}
