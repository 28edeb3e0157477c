use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{Label, Mode};
use crate::error::{Error, Result};
use crate::params::from_mhz;

/// Fraction of the signal range a local maximum must stand out by to count
/// as an oscillation peak.
const PEAK_PROMINENCE: f64 = 0.1;

/// Squared modulus of one mode's mean fluctuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Observable {
    PopCL,
    PopCR,
    PopAL,
    PopAR,
    PopB,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::PopCL,
        Observable::PopCR,
        Observable::PopAL,
        Observable::PopAR,
        Observable::PopB,
    ];

    pub fn mode(self) -> Mode {
        match self {
            Observable::PopCL => Mode::EnsembleL,
            Observable::PopCR => Mode::EnsembleR,
            Observable::PopAL => Mode::CavityL,
            Observable::PopAR => Mode::CavityR,
            Observable::PopB => Mode::Mechanical,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::PopCL => "pop_cL",
            Observable::PopCR => "pop_cR",
            Observable::PopAL => "pop_aL",
            Observable::PopAR => "pop_aR",
            Observable::PopB => "pop_b",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s || o.name().trim_start_matches("pop_") == s)
            .ok_or_else(|| format!("unknown observable '{s}'"))
    }
}

/// Sampled mean fluctuations. Populations are stored per point in the order
/// of [`Observable::ALL`]; modes absent from the model are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    basis: Vec<Label>,
    t: Vec<f64>,
    states: Vec<Vec<C64>>,
    populations: Vec<[f64; 5]>,
}

impl Trajectory {
    pub fn new(basis: Vec<Label>, t: Vec<f64>, states: Vec<Vec<C64>>) -> Self {
        let slots: Vec<Option<usize>> = Observable::ALL
            .iter()
            .map(|o| basis.iter().position(|&l| l == Label::ann(o.mode())))
            .collect();
        let populations = states
            .iter()
            .map(|x| {
                let mut pops = [f64::NAN; 5];
                for (p, slot) in pops.iter_mut().zip(&slots) {
                    if let Some(i) = slot {
                        *p = x[*i].norm_sqr();
                    }
                }
                pops
            })
            .collect();
        Self {
            basis,
            t,
            states,
            populations,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn basis(&self) -> &[Label] {
        &self.basis
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    pub fn populations(&self) -> &[[f64; 5]] {
        &self.populations
    }

    pub fn has(&self, obs: Observable) -> bool {
        self.basis.contains(&Label::ann(obs.mode()))
    }

    /// Time series of one population, `None` if the mode is not in the model.
    pub fn population(&self, obs: Observable) -> Option<Vec<f64>> {
        if !self.has(obs) {
            return None;
        }
        let k = Observable::ALL.iter().position(|&o| o == obs).unwrap();
        Some(self.populations.iter().map(|p| p[k]).collect())
    }

    /// Largest |⟨δO⟩ − conj⟨δO†⟩| over all samples.
    pub fn pairing_residual(&self) -> f64 {
        let pair: Vec<usize> = self
            .basis
            .iter()
            .map(|l| self.basis.iter().position(|&m| m == l.adjoint()).unwrap())
            .collect();
        self.states
            .iter()
            .flat_map(|x| pair.iter().enumerate().map(move |(i, &j)| (x[j] - x[i].conj()).norm()))
            .fold(0.0, f64::max)
    }

    /// Writes `t_us,re_<label>,im_<label>,...,pop_cL,pop_cR,pop_aL,pop_aR,pop_b`.
    /// With `normalize_time` the first column is t·(2π·1 MHz) and named `t_norm`.
    pub fn write_csv<W: Write>(&self, mut out: W, normalize_time: bool) -> io::Result<()> {
        let mut header = String::from(if normalize_time { "t_norm" } else { "t_us" });
        for l in &self.basis {
            header.push_str(&format!(",re_{l},im_{l}"));
        }
        for o in Observable::ALL {
            header.push(',');
            header.push_str(o.name());
        }
        header.push('\n');
        out.write_all(header.as_bytes())?;

        let scale = if normalize_time { from_mhz(1.0) } else { 1.0 };
        let mut line = String::new();
        for ((t, x), pops) in self.t.iter().zip(&self.states).zip(&self.populations) {
            line.clear();
            line.push_str(&format!("{:?}", t * scale));
            for v in x {
                line.push_str(&format!(",{:?},{:?}", v.re, v.im));
            }
            for p in pops {
                line.push_str(&format!(",{p:?}"));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Oscillation period of a population from the spacing of its maxima.
///
/// Peaks are discrete local maxima whose prominence exceeds 10% of the
/// signal range, refined by a three-point parabola. The first peak is
/// dropped to avoid transients, and at least two peaks must remain.
pub fn rabi_period(traj: &Trajectory, obs: Observable) -> Result<f64> {
    let y = traj
        .population(obs)
        .ok_or_else(|| Error::InsufficientData(format!("{obs} is not part of this model")))?;
    let t = traj.times();
    let peaks = find_peaks(t, &y);
    let used = peaks.get(1..).unwrap_or(&[]);
    if used.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "found {} usable peaks in {obs}, need 2",
            used.len()
        )));
    }
    Ok((used[used.len() - 1] - used[0]) / (used.len() - 1) as f64)
}

fn find_peaks(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Vec::new();
    }

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        if prominence(y, i) < PEAK_PROMINENCE * range {
            continue;
        }
        // parabola through (i−1, i, i+1), uniform spacing
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        let denom = a - 2.0 * b + c;
        let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
        let h = t[i + 1] - t[i];
        peaks.push(t[i] + offset.clamp(-1.0, 1.0) * h);
    }
    peaks
}

fn prominence(y: &[f64], i: usize) -> f64 {
    let peak = y[i];
    let mut left_min = peak;
    for &v in y[..i].iter().rev() {
        if v > peak {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = peak;
    for &v in &y[i + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Difference {
    pub observable: Observable,
    pub max: f64,
    pub rms: f64,
}

/// Max and RMS of |a − b| for each observable; the time grids must match.
pub fn compare(a: &Trajectory, b: &Trajectory, observables: &[Observable]) -> Result<Vec<Difference>> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", a.len(), b.len())));
    }
    for (k, (ta, tb)) in a.times().iter().zip(b.times()).enumerate() {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("sample {k}: t = {ta} vs {tb}")));
        }
    }
    observables
        .iter()
        .map(|&obs| {
            let missing = || Error::InsufficientData(format!("{obs} is not part of both models"));
            let ya = a.population(obs).ok_or_else(missing)?;
            let yb = b.population(obs).ok_or_else(missing)?;
            let (max, sq) = ya
                .iter()
                .zip(&yb)
                .map(|(u, v)| (u - v).abs())
                .fold((0.0f64, 0.0), |(m, s), d| (m.max(d), s + d * d));
            Ok(Difference {
                observable: obs,
                max,
                rms: (sq / ya.len().max(1) as f64).sqrt(),
            })
        })
        .collect()
}
