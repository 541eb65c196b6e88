//! Incoherent fluorescence spectra from the resolvent `(z - M)^{-1}`.
//!
//! Two evaluations are provided. [`spectrum_eq10`] keeps the literal
//! operator structure in which the drive term is propagated by
//! `M^{-1} (z - M)^{-1}` and divided by `z`, which is singular at line
//! center. [`spectrum_consistent`] is the Laplace transform of the
//! regression-theorem correlation with the coherent part subtracted; it is
//! finite everywhere and is what the time-domain oracle in [`crate::qrt`]
//! reproduces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{Lu, Mat15, Vec15};
use crate::model::{build_liouvillian, Liouvillian, StateVector, ValidatedParams};
use crate::steadystate::{stability_eigs, steady_state, PIVOT_TOL};

/// Grid points closer than this to line center are rejected by the
/// literal evaluation.
pub const POLE_GUARD: f64 = 1e-6;
/// `z` closer than this to an eigenvalue of `M` makes the resolvent singular.
pub const EIGEN_GUARD: f64 = 1e-12;

/// Emission line, labelled by its lower level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Transition {
    /// 2 -> 1
    #[serde(rename = "1")]
    L21,
    /// 3 -> 2
    #[serde(rename = "2")]
    L32,
    /// 4 -> 3
    #[serde(rename = "3")]
    L43,
}

impl Transition {
    pub const ALL: [Transition; 3] = [Transition::L21, Transition::L32, Transition::L43];

    /// 1-based transition number; also the index of its coherence in the
    /// state vector. The upper-level population sits at `index + 6`.
    pub fn index(self) -> usize {
        match self {
            Transition::L21 => 1,
            Transition::L32 => 2,
            Transition::L43 => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Transition::L21),
            2 => Some(Transition::L32),
            3 => Some(Transition::L43),
            _ => None,
        }
    }

    /// Column label used in tables, `S1`..`S3`.
    pub fn label(self) -> &'static str {
        ["S1", "S2", "S3"][self.index() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "eq10")]
    Eq10,
    #[serde(rename = "qrt-consistent")]
    QrtConsistent,
    #[serde(rename = "timedomain")]
    TimeDomain,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eq10 => "eq10",
            Method::QrtConsistent => "qrt-consistent",
            Method::TimeDomain => "timedomain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineSpectrum {
    pub transition: Transition,
    pub values: Vec<f64>,
}

/// Spectra on a frequency grid measured from each line's center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSeries {
    pub nu: Vec<f64>,
    pub lines: Vec<LineSpectrum>,
    /// `mu_i^2 |psi_i(inf)|^2` for the three transitions.
    pub coherent_weight: [f64; 3],
    pub method: Method,
}

impl SpectrumSeries {
    pub fn line(&self, t: Transition) -> Option<&[f64]> {
        self.lines
            .iter()
            .find(|l| l.transition == t)
            .map(|l| l.values.as_slice())
    }

    /// Global maximum of a line and its frequency. Ties go to the smaller
    /// `|nu|`, then to the earlier grid point.
    pub fn peak(&self, t: Transition) -> Option<(f64, f64)> {
        let values = self.line(t)?;
        peak_of(&self.nu, values)
    }

    /// Value at the grid point nearest line center.
    pub fn line_center(&self, t: Transition) -> Option<(f64, f64)> {
        let values = self.line(t)?;
        let k = (0..self.nu.len()).min_by(|&a, &b| self.nu[a].abs().total_cmp(&self.nu[b].abs()))?;
        Some((values[k], self.nu[k]))
    }
}

/// `(max value, nu at max)` with ties resolved toward smaller `|nu|`.
pub fn peak_of(nu: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (&x, &v) in nu.iter().zip(values) {
        best = match best {
            None => Some((v, x)),
            Some((bv, bx)) if v > bv || (v == bv && x.abs() < bx.abs()) => Some((v, x)),
            keep => keep,
        };
    }
    best
}

/// Removes points within [`POLE_GUARD`] of line center.
pub fn exclude_pole(nu: &[f64]) -> Vec<f64> {
    nu.iter().copied().filter(|x| x.abs() >= POLE_GUARD).collect()
}

/// `mu_i^2 |psi_i(inf)|^2`, the weights of the elastic delta peaks.
pub fn coherent_weights(psi_inf: &StateVector, mu: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|k| mu[k] * mu[k] * psi_inf.0[k].norm_sqr())
}

/// Factorized resolvent evaluation for one generator.
pub struct Resolvent<'a> {
    l: &'a Liouvillian,
    eigs: Vec<Complex64>,
}

/// LU of `z I - M` at one point.
pub struct ResolventAt {
    lu: Lu,
}

impl ResolventAt {
    pub fn apply(&self, rhs: &Vec15) -> Vec15 {
        self.lu.solve(rhs)
    }

    /// Diagonal element `R_ii(z)` for 1-based `i`.
    pub fn diagonal(&self, i: usize) -> Complex64 {
        self.lu.solve(&Vec15::ith(i - 1, Complex64::new(1.0, 0.0)))[i - 1]
    }
}

impl<'a> Resolvent<'a> {
    pub fn new(l: &'a Liouvillian) -> Self {
        Self {
            l,
            eigs: stability_eigs(l),
        }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigs
    }

    pub fn at(&self, z: Complex64) -> Result<ResolventAt> {
        let distance = self.eigs.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min);
        let singular = || Error::ResolventSingular {
            re: z.re,
            im: z.im,
            distance,
        };
        if distance < EIGEN_GUARD {
            return Err(singular());
        }
        let a: Mat15 = Mat15::identity() * z - self.l.m;
        let lu = Lu::new(a, PIVOT_TOL * 1e-3).ok_or_else(singular)?;
        Ok(ResolventAt { lu })
    }
}

/// Solves `(z I - M) x = rhs`.
pub fn resolvent_apply(l: &Liouvillian, z: Complex64, rhs: &Vec15) -> Result<Vec15> {
    Ok(Resolvent::new(l).at(z)?.apply(rhs))
}

fn check_grid(nu: &[f64]) -> Result<()> {
    if nu.is_empty() {
        return Err(Error::InvalidGrid("empty frequency grid".into()));
    }
    if let Some(x) = nu.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite frequency {x}")));
    }
    Ok(())
}

fn assemble(
    nu: &[f64],
    rows: Vec<[f64; 3]>,
    psi: &StateVector,
    mu: &[f64; 3],
    method: Method,
) -> SpectrumSeries {
    let lines = Transition::ALL
        .iter()
        .map(|&t| LineSpectrum {
            transition: t,
            values: rows.iter().map(|r| r[t.index() - 1]).collect(),
        })
        .collect();
    SpectrumSeries {
        nu: nu.to_vec(),
        lines,
        coherent_weight: coherent_weights(psi, mu),
        method,
    }
}

/// Literal evaluation:
/// `S_i = Re[mu_i^2 (R_ii(z) psi_{i+6} + (1/z) (M^{-1} R(z) C)_i conj(psi_i))]`
/// with `z = i nu`. Every `|nu|` must be at least [`POLE_GUARD`].
pub fn spectrum_eq10(p: &ValidatedParams, nu: &[f64]) -> Result<SpectrumSeries> {
    spectrum_eq10_with(p, nu, Exec::default())
}

pub fn spectrum_eq10_with(p: &ValidatedParams, nu: &[f64], exec: Exec) -> Result<SpectrumSeries> {
    check_grid(nu)?;
    if let Some(x) = nu.iter().find(|x| x.abs() < POLE_GUARD) {
        return Err(Error::InvalidGrid(format!(
            "frequency {x} lies inside the line-center pole guard (|nu| < {POLE_GUARD:e})"
        )));
    }
    let l = build_liouvillian(p);
    let psi = steady_state(&l)?;
    let m_inv = Lu::new(l.m, PIVOT_TOL)
        .ok_or_else(|| Error::SingularLiouvillian("M is not invertible".into()))?;
    let res = Resolvent::new(&l);
    let mu = p.mu;
    let rows = exec.map(nu, |&x| -> Result<[f64; 3]> {
        let z = Complex64::new(0.0, x);
        let r = res.at(z)?;
        let n_c = m_inv.solve(&r.apply(&l.c));
        Ok([1, 2, 3].map(|i| {
            let term = r.diagonal(i) * psi.get(i + 6) + n_c[i - 1] / z * psi.get(i).conj();
            mu[i - 1] * mu[i - 1] * term.re
        }))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(assemble(nu, rows, &psi, &mu, Method::Eq10))
}

/// Regression-theorem evaluation:
/// `S_i = Re[mu_i^2 (R_ii(i nu) psi_{i+6} - (R(i nu) psi)_i conj(psi_i))]`.
pub fn spectrum_consistent(p: &ValidatedParams, nu: &[f64]) -> Result<SpectrumSeries> {
    spectrum_consistent_with(p, nu, Exec::default())
}

pub fn spectrum_consistent_with(p: &ValidatedParams, nu: &[f64], exec: Exec) -> Result<SpectrumSeries> {
    check_grid(nu)?;
    let l = build_liouvillian(p);
    let psi = steady_state(&l)?;
    let res = Resolvent::new(&l);
    let mu = p.mu;
    let rows = exec.map(nu, |&x| -> Result<[f64; 3]> {
        let r = res.at(Complex64::new(0.0, x))?;
        let r_psi = r.apply(&psi.0);
        Ok([1, 2, 3].map(|i| {
            let term = r.diagonal(i) * psi.get(i + 6) - r_psi[i - 1] * psi.get(i).conj();
            mu[i - 1] * mu[i - 1] * term.re
        }))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(assemble(nu, rows, &psi, &mu, Method::QrtConsistent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;
    use crate::linalg::max_abs;
    use crate::model::SystemParams;

    fn params(omega: [f64; 3]) -> ValidatedParams {
        SystemParams::reference(omega).validate().unwrap()
    }

    #[test]
    fn resolvent_large_z_asymptote() {
        let l = build_liouvillian(&params([7.0, 4.0, 1.0]));
        let rhs = Vec15::from_fn(|k, _| Complex64::new(k as f64 - 3.0, 0.5));
        let z = Complex64::new(1e6, 0.0);
        let x = resolvent_apply(&l, z, &rhs).unwrap();
        let want = rhs / z;
        assert!(max_abs(&(x - want)) <= 1e-4 * max_abs(&want));
    }

    #[test]
    fn resolvent_at_zero_reproduces_steady_state() {
        // (0 - M)^{-1} C = -M^{-1} C = psi(inf)
        let l = build_liouvillian(&params([7.0, 4.0, 1.0]));
        let x = resolvent_apply(&l, Complex64::new(0.0, 0.0), &l.c).unwrap();
        let psi = steady_state(&l).unwrap();
        assert!(max_abs(&(x - psi.0)) <= 1e-10);
    }

    #[test]
    fn resolvent_rejects_eigenvalues() {
        let l = build_liouvillian(&params([0.0; 3]));
        let err = resolvent_apply(&l, Complex64::new(-3.0, 0.0), &l.c).unwrap_err();
        assert_eq!(err.code(), "ResolventSingular");
    }

    #[test]
    fn zero_dipoles_give_zero_spectra() {
        let mut p = SystemParams::reference([7.0, 4.0, 1.0]);
        p.mu = [0.0; 3];
        let p = p.validate().unwrap();
        let nu = exclude_pole(&linspace(-10.0, 10.0, 41).unwrap());
        for s in [spectrum_eq10(&p, &nu).unwrap(), spectrum_consistent(&p, &nu).unwrap()] {
            assert!(s.lines.iter().all(|l| l.values.iter().all(|&v| v == 0.0)));
            assert_eq!(s.coherent_weight, [0.0; 3]);
        }
    }

    #[test]
    fn eq10_rejects_line_center() {
        let p = params([7.0, 4.0, 1.0]);
        let err = spectrum_eq10(&p, &[-1.0, 0.0, 1.0]).unwrap_err();
        assert_eq!(err.code(), "InvalidGrid");
        assert!(spectrum_consistent(&p, &[0.0]).is_ok());
    }

    #[test]
    fn upper_lines_vanish_without_upper_drives() {
        let p = params([7.0, 0.0, 0.0]);
        let nu = linspace(-30.0, 30.0, 61).unwrap();
        let s = spectrum_consistent(&p, &nu).unwrap();
        for t in [Transition::L32, Transition::L43] {
            assert!(s.line(t).unwrap().iter().all(|&v| v.abs() <= 1e-15));
        }
    }

    #[test]
    fn coherent_weights_two_level() {
        let p = params([7.0, 0.0, 0.0]);
        let psi = steady_state(&build_liouvillian(&p)).unwrap();
        let w = coherent_weights(&psi, &p.mu);
        let rho22 = 196.0 / 428.0;
        let want = (2.0 * 7.0 * (2.0 * rho22 - 1.0) / 6.0_f64).powi(2);
        assert!((w[0] - want).abs() < 1e-12);
        assert_eq!(w[1], 0.0);
        assert_eq!(w[2], 0.0);
        let undriven = steady_state(&build_liouvillian(&params([0.0; 3]))).unwrap();
        assert_eq!(coherent_weights(&undriven, &[1.0; 3]), [0.0; 3]);
    }

    #[test]
    fn peak_ties_prefer_line_center() {
        let nu = [-2.0, -1.0, 1.0, 2.0];
        assert_eq!(peak_of(&nu, &[3.0, 1.0, 1.0, 3.0]), Some((3.0, -2.0)));
        assert_eq!(peak_of(&nu, &[1.0, 3.0, 3.0, 1.0]), Some((3.0, -1.0)));
        assert_eq!(peak_of(&[2.0, -1.0], &[5.0, 5.0]), Some((5.0, -1.0)));
    }

    #[test]
    fn exec_strategies_match_bitwise() {
        let p = params([7.0, 4.0, 1.0]);
        let nu = exclude_pole(&linspace(-25.0, 25.0, 201).unwrap());
        let a = spectrum_eq10_with(&p, &nu, Exec::Sequential).unwrap();
        let b = spectrum_eq10_with(&p, &nu, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
