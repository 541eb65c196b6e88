//! Steady state by direct solve, fixed-step time integration as an
//! independent route, and the spectrum of the generator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Lu, Mat15, Vec15};
use crate::model::{Liouvillian, StateVector};

/// Pivot threshold, relative to the largest entry of `M`.
pub const PIVOT_TOL: f64 = 1e-12;
/// Bound on `|M psi + C|_inf` accepted from the direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Any component beyond this modulus means the integrator blew up.
pub const DIVERGENCE_BOUND: f64 = 10.0;

/// `psi(inf) = -M^{-1} C`.
pub fn steady_state(l: &Liouvillian) -> Result<StateVector> {
    let lu = Lu::new(l.m, PIVOT_TOL).ok_or_else(|| {
        Error::SingularLiouvillian("pivot below threshold; check for undamped or undriven levels".into())
    })?;
    let psi = -lu.solve(&l.c);
    let residual = linalg::max_abs(&l.rhs(&psi));
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::SingularLiouvillian(format!(
            "steady-state residual {residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(StateVector(psi))
}

/// Eigenvalues of `M`, sorted by descending real part (ties by imaginary
/// part).
pub fn stability_eigs(l: &Liouvillian) -> Vec<Complex64> {
    let mut eigs = linalg::eigenvalues(&l.m);
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    eigs
}

/// Sampled solution of the affine ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl Trajectory {
    pub fn last(&self) -> &StateVector {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Classical fourth-order Runge-Kutta with a fixed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub dt: f64,
    /// Keep every `stride`-th step; the initial and final states are
    /// always kept.
    pub stride: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            stride: 100,
        }
    }
}

impl Integrator {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    /// Integrates `dy/dt = M y + f` from `y0` over `[0, t_end]`. The last
    /// step is shortened to land exactly on `t_end`.
    pub fn run_affine(&self, m: &Mat15, f: &Vec15, y0: Vec15, t_end: f64) -> Result<(Vec<f64>, Vec<Vec15>)> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidGrid(format!("step size must be positive, got {}", self.dt)));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidGrid(format!("t_end must be non-negative, got {t_end}")));
        }
        let stride = self.stride.max(1);
        let full_steps = (t_end / self.dt * (1.0 + 1e-12)).floor() as usize;
        let remainder = t_end - full_steps as f64 * self.dt;
        let partial = remainder > 1e-12 * self.dt.max(t_end);

        let rhs = |y: &Vec15| m * y + f;
        let step = |y: &Vec15, h: f64| {
            let k1 = rhs(y);
            let k2 = rhs(&(y + k1 * Complex64::from(h / 2.0)));
            let k3 = rhs(&(y + k2 * Complex64::from(h / 2.0)));
            let k4 = rhs(&(y + k3 * Complex64::from(h)));
            y + (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(h / 6.0)
        };

        let capacity = full_steps / stride + 3;
        let mut times = Vec::with_capacity(capacity);
        let mut states = Vec::with_capacity(capacity);
        times.push(0.0);
        states.push(y0);
        let mut y = y0;
        for n in 1..=full_steps {
            y = step(&y, self.dt);
            let t = n as f64 * self.dt;
            let norm = linalg::max_abs(&y);
            if !(norm <= DIVERGENCE_BOUND) {
                return Err(Error::StepSizeTooLarge { t, norm });
            }
            if n % stride == 0 || (n == full_steps && !partial) {
                times.push(if n == full_steps && !partial { t_end } else { t });
                states.push(y);
            }
        }
        if partial {
            y = step(&y, remainder);
            let norm = linalg::max_abs(&y);
            if !(norm <= DIVERGENCE_BOUND) {
                return Err(Error::StepSizeTooLarge { t: t_end, norm });
            }
            times.push(t_end);
            states.push(y);
        }
        Ok((times, states))
    }

    pub fn run(&self, l: &Liouvillian, psi0: &StateVector, t_end: f64) -> Result<Trajectory> {
        let (times, states) = self.run_affine(&l.m, &l.c, psi0.0, t_end)?;
        Ok(Trajectory {
            times,
            states: states.into_iter().map(StateVector).collect(),
        })
    }
}

/// Time-domain evolution of `d psi/dt = M psi + C` with the default
/// sampling stride.
pub fn integrate(l: &Liouvillian, psi0: &StateVector, t_end: f64, dt: f64) -> Result<Trajectory> {
    Integrator::new(dt).run(l, psi0, t_end)
}
