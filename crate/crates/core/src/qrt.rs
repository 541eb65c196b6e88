//! Time-domain two-time correlations from the quantum regression theorem
//! and their numerical Fourier transform. Independent of the resolvent
//! path in [`crate::spectrum`] and used to check it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::Vec15;
use crate::model::{build_liouvillian, StateVector, ValidatedParams, COMPONENTS};
use crate::spectrum::{LineSpectrum, Method, SpectrumSeries, Transition};
use crate::steadystate::{steady_state, Integrator};

/// Required closeness of `g(tau_max)` to its asymptote.
pub const ASYMPTOTE_TOL: f64 = 1e-6;
/// Default correlation horizon, in units of the inverse linewidth.
pub const DEFAULT_TAU_MAX: f64 = 50.0;

/// Which initial correlations are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    /// Only the component of the line's own coherence starts nonzero.
    Truncated,
    /// All components start from `<B_k A_{i,i+1}>` in the steady state.
    Full,
}

/// Uniform delay grid `tau_k = k * dt * stride` on `[0, tau_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub tau_max: f64,
    /// Integrator step.
    pub dt: f64,
    /// Integrator steps per stored sample.
    pub stride: usize,
}

impl TauGrid {
    pub fn spacing(&self) -> f64 {
        self.dt * self.stride as f64
    }

    /// Finest sampling that still satisfies the quadrature bound for
    /// frequencies up to `nu_max`, on the default integrator step.
    pub fn for_spectrum(tau_max: f64, nu_max: f64) -> Self {
        let dt = Integrator::default().dt;
        let bound = max_quadrature_step(nu_max);
        let stride = ((bound / dt) * (1.0 + 1e-12)).floor().max(1.0) as usize;
        Self { tau_max, dt, stride }
    }
}

/// Largest trapezoid step allowed for frequencies up to `nu_max`:
/// `min(1e-2, pi / (10 nu_max))`.
pub fn max_quadrature_step(nu_max: f64) -> f64 {
    if nu_max > 0.0 {
        (std::f64::consts::PI / (10.0 * nu_max)).min(1e-2)
    } else {
        1e-2
    }
}

/// `g(tau) = <A_{i+1,i}(tau) A_{i,i+1}(0)>` in the steady state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSeries {
    pub tau: Vec<f64>,
    pub g: Vec<Complex64>,
    /// Limit of `g` as `tau -> inf`: `|psi_i(inf)|^2`.
    pub asymptote: Complex64,
    pub transition: Transition,
    pub mode: CorrelationMode,
    /// Dipole magnitude of the transition.
    pub mu: f64,
}

/// Initial vector `u_k(0) = <B_k A_{i,i+1}>` where `B_k` is the flip
/// operator whose expectation is component `k`. With `psi_k = rho_ab` the
/// operator is `A_ba`, and `A_ba A_{i,i+1} = delta_{a,i} A_{b,i+1}`, whose
/// expectation is `rho_{i+1,b}`.
pub fn full_initial_condition(psi: &StateVector, t: Transition) -> Vec15 {
    let i = t.index();
    Vec15::from_fn(|k, _| {
        let (a, b) = COMPONENTS[k];
        if a == i {
            psi.rho(i + 1, b)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Integrates `du/dtau = M u + C conj(psi_i)` and returns `g = u_i`.
pub fn correlation(
    p: &ValidatedParams,
    t: Transition,
    grid: TauGrid,
    mode: CorrelationMode,
) -> Result<CorrelationSeries> {
    let l = build_liouvillian(p);
    let psi = steady_state(&l)?;
    correlation_from(&l.m, &l.c, &psi, p.mu[t.index() - 1], t, grid, mode)
}

fn correlation_from(
    m: &crate::linalg::Mat15,
    c: &Vec15,
    psi: &StateVector,
    mu: f64,
    t: Transition,
    grid: TauGrid,
    mode: CorrelationMode,
) -> Result<CorrelationSeries> {
    let i = t.index();
    let lowering = psi.get(i).conj();
    let u0 = match mode {
        CorrelationMode::Truncated => Vec15::ith(i - 1, psi.get(i + 6)),
        CorrelationMode::Full => full_initial_condition(psi, t),
    };
    let integrator = Integrator {
        dt: grid.dt,
        stride: grid.stride,
    };
    let (tau, states) = integrator.run_affine(m, &(c * lowering), u0, grid.tau_max)?;
    Ok(CorrelationSeries {
        tau,
        g: states.iter().map(|u| u[i - 1]).collect(),
        asymptote: psi.get(i) * lowering,
        transition: t,
        mode,
        mu,
    })
}

/// `S(nu) = mu^2 Re int_0^tau_max e^{-i nu tau} (g(tau) - g_inf) dtau` by the
/// trapezoid rule. The returned series carries only this transition; its
/// coherent weight is `mu^2 |g_inf|` at that transition and zero elsewhere.
pub fn transform_spectrum(series: &CorrelationSeries, nu: &[f64]) -> Result<SpectrumSeries> {
    transform_spectrum_with(series, nu, Exec::default())
}

pub fn transform_spectrum_with(series: &CorrelationSeries, nu: &[f64], exec: Exec) -> Result<SpectrumSeries> {
    let n = series.tau.len();
    if n < 2 || series.tau[0] != 0.0 {
        return Err(Error::InvalidGrid("delay grid must start at 0 with at least two samples".into()));
    }
    let tau_max = series.tau[n - 1];
    let residual = (series.g[n - 1] - series.asymptote).norm();
    if !(residual <= ASYMPTOTE_TOL) {
        return Err(Error::HorizonTooShort { tau_max, residual });
    }
    let h = series.tau[1] - series.tau[0];
    let uniform = series
        .tau
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1.0));
    // the final sample may follow a shortened step
    let body_uniform = uniform
        || series.tau[..n - 1]
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1.0));
    if !body_uniform {
        return Err(Error::InvalidGrid("delay grid is not uniform".into()));
    }
    let nu_max = nu.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let bound = max_quadrature_step(nu_max);
    if h > bound * (1.0 + 1e-9) {
        return Err(Error::InvalidGrid(format!(
            "delay spacing {h} exceeds the quadrature bound {bound} for |nu| <= {nu_max}"
        )));
    }

    let f: Vec<Complex64> = series.g.iter().map(|g| g - series.asymptote).collect();
    let tau = &series.tau;
    let mu2 = series.mu * series.mu;
    let values = exec.map(nu, |&x| mu2 * trapezoid_fourier(tau, &f, x).re);
    let mut coherent_weight = [0.0; 3];
    coherent_weight[series.transition.index() - 1] = mu2 * series.asymptote.norm();
    Ok(SpectrumSeries {
        nu: nu.to_vec(),
        lines: vec![LineSpectrum {
            transition: series.transition,
            values,
        }],
        coherent_weight,
        method: Method::TimeDomain,
    })
}

/// `int e^{-i nu tau} f(tau) dtau` over the samples, trapezoid rule. The
/// phase factor is advanced by multiplication and re-seeded periodically.
fn trapezoid_fourier(tau: &[f64], f: &[Complex64], nu: f64) -> Complex64 {
    const RESEED: usize = 256;
    let n = tau.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phase = Complex64::new(1.0, 0.0);
    let h = tau[1] - tau[0];
    let rot = Complex64::from_polar(1.0, -nu * h);
    for k in 0..n - 1 {
        if k % RESEED == 0 {
            phase = Complex64::from_polar(1.0, -nu * tau[k]);
        }
        let next = if (k + 1) % RESEED == 0 || k + 1 == n - 1 {
            Complex64::from_polar(1.0, -nu * tau[k + 1])
        } else {
            phase * rot
        };
        let dt = tau[k + 1] - tau[k];
        acc += (phase * f[k] + next * f[k + 1]) * (0.5 * dt);
        phase = next;
    }
    acc
}

/// Spectra of all three lines from the time-domain route.
pub fn spectrum_timedomain(
    p: &ValidatedParams,
    nu: &[f64],
    grid: TauGrid,
    mode: CorrelationMode,
) -> Result<SpectrumSeries> {
    spectrum_timedomain_with(p, nu, grid, mode, Exec::default())
}

pub fn spectrum_timedomain_with(
    p: &ValidatedParams,
    nu: &[f64],
    grid: TauGrid,
    mode: CorrelationMode,
    exec: Exec,
) -> Result<SpectrumSeries> {
    let l = build_liouvillian(p);
    let psi = steady_state(&l)?;
    let mut lines = Vec::with_capacity(3);
    for t in Transition::ALL {
        let series = correlation_from(&l.m, &l.c, &psi, p.mu[t.index() - 1], t, grid, mode)?;
        let s = transform_spectrum_with(&series, nu, exec)?;
        lines.extend(s.lines);
    }
    Ok(SpectrumSeries {
        nu: nu.to_vec(),
        lines,
        coherent_weight: crate::spectrum::coherent_weights(&psi, &p.mu),
        method: Method::TimeDomain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;

    fn params(omega: [f64; 3]) -> ValidatedParams {
        SystemParams::reference(omega).validate().unwrap()
    }

    fn short_grid() -> TauGrid {
        TauGrid {
            tau_max: 50.0,
            dt: 1e-3,
            stride: 10,
        }
    }

    #[test]
    fn full_mode_starts_at_upper_population() {
        let p = params([7.0, 4.0, 1.0]);
        let psi = steady_state(&build_liouvillian(&p)).unwrap();
        for t in Transition::ALL {
            let u0 = full_initial_condition(&psi, t);
            let i = t.index();
            assert_eq!(u0[i - 1], psi.get(i + 6));
        }
        let s = correlation(&p, Transition::L32, short_grid(), CorrelationMode::Full).unwrap();
        assert!(s.g[0].im.abs() < 1e-10);
        assert!((0.0..=1.0).contains(&s.g[0].re));
    }

    #[test]
    fn two_level_modes_coincide() {
        let p = params([7.0, 0.0, 0.0]);
        let a = correlation(&p, Transition::L21, short_grid(), CorrelationMode::Truncated).unwrap();
        let b = correlation(&p, Transition::L21, short_grid(), CorrelationMode::Full).unwrap();
        let psi = steady_state(&build_liouvillian(&p)).unwrap();
        let u0 = full_initial_condition(&psi, Transition::L21);
        assert!(u0.iter().enumerate().all(|(k, z)| k == 0 || z.norm() < 1e-15));
        for (x, y) in a.g.iter().zip(&b.g) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn correlation_relaxes_to_coherent_value() {
        let p = params([7.0, 4.0, 1.0]);
        let s = correlation(&p, Transition::L43, short_grid(), CorrelationMode::Truncated).unwrap();
        assert_eq!(*s.tau.last().unwrap(), 50.0);
        assert!((s.g.last().unwrap() - s.asymptote).norm() <= 1e-6);
    }

    #[test]
    fn constant_correlation_has_no_incoherent_part() {
        let series = CorrelationSeries {
            tau: (0..=5000).map(|k| k as f64 * 1e-2).collect(),
            g: vec![Complex64::new(0.3, 0.1); 5001],
            asymptote: Complex64::new(0.3, 0.1),
            transition: Transition::L21,
            mode: CorrelationMode::Truncated,
            mu: 1.0,
        };
        let s = transform_spectrum(&series, &[-3.0, 0.0, 2.5]).unwrap();
        assert!(s.lines[0].values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lorentzian_transform() {
        // g - g_inf = e^{-a tau}  =>  Re int = a / (a^2 + nu^2)
        let a = 1.5;
        let tau: Vec<f64> = (0..=50_000).map(|k| k as f64 * 1e-3).collect();
        let series = CorrelationSeries {
            g: tau.iter().map(|t| Complex64::new((-a * t).exp(), 0.0)).collect(),
            tau,
            asymptote: Complex64::new(0.0, 0.0),
            transition: Transition::L32,
            mode: CorrelationMode::Full,
            mu: 2.0,
        };
        let nu = [-10.0, -1.0, 0.0, 0.7, 12.0];
        let s = transform_spectrum(&series, &nu).unwrap();
        for (x, v) in nu.iter().zip(s.line(Transition::L32).unwrap()) {
            let want = 4.0 * a / (a * a + x * x);
            assert!((v - want).abs() < 1e-6, "nu={x}: {v} vs {want}");
        }
    }

    #[test]
    fn short_horizon_is_rejected() {
        let p = params([7.0, 4.0, 1.0]);
        let grid = TauGrid {
            tau_max: 2.0,
            dt: 1e-3,
            stride: 10,
        };
        let s = correlation(&p, Transition::L21, grid, CorrelationMode::Truncated).unwrap();
        let err = transform_spectrum(&s, &[0.0, 1.0]).unwrap_err();
        assert_eq!(err.code(), "HorizonTooShort");
    }

    #[test]
    fn coarse_delay_grid_is_rejected() {
        let p = params([7.0, 4.0, 1.0]);
        let s = correlation(&p, Transition::L21, short_grid(), CorrelationMode::Truncated).unwrap();
        // spacing 1e-2 is too coarse for |nu| up to 100
        assert_eq!(transform_spectrum(&s, &[100.0]).unwrap_err().code(), "InvalidGrid");
        assert!(transform_spectrum(&s, &[20.0]).is_ok());
    }

    #[test]
    fn quadrature_step_bound() {
        assert_eq!(max_quadrature_step(0.0), 1e-2);
        assert_eq!(max_quadrature_step(25.0), 1e-2);
        assert!((max_quadrature_step(120.0) - std::f64::consts::PI / 1200.0).abs() < 1e-15);
        assert_eq!(TauGrid::for_spectrum(50.0, 120.0).stride, 2);
        assert_eq!(TauGrid::for_spectrum(50.0, 25.0).stride, 10);
    }
}
