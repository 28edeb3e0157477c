//! Eigen-decomposition of general complex matrices.
//!
//! nalgebra supplies the complex Schur form A = QTQ†; eigenvectors come from
//! back-substitution on the upper-triangular T.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors, one per value.
    pub vectors: Vec<DVector<C64>>,
}

fn schur(a: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    Schur::try_new(a.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .map(Schur::unpack)
        .ok_or_else(|| failure(a))
}

fn failure(a: &DMatrix<C64>) -> Error {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Error::Eigensolver {
        dim: a.nrows(),
        norm: a.norm(),
        condition: max / min,
    }
}

pub fn eigenvalues(a: &DMatrix<C64>) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    Ok(t.diagonal().iter().copied().collect())
}

pub fn eigen(a: &DMatrix<C64>) -> Result<Eigen> {
    let (q, t) = schur(a)?;
    let n = t.nrows();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let small = scale * f64::EPSILON;

    let values: Vec<C64> = t.diagonal().iter().copied().collect();
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        // (T − λ_k) y = 0 with y_k = 1, y_j = 0 for j > k
        let lambda = values[k];
        let mut y = DVector::<C64>::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[i] = -s / d;
        }
        let mut v = &q * y;
        let norm = v.norm();
        if norm > 0.0 {
            v /= C64::from(norm);
        }
        vectors.push(v);
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(failure(a));
    }
    Ok(Eigen { values, vectors })
}
