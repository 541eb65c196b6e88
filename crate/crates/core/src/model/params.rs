use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the closed-system rate constraints.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Physical inputs of the driven ladder, all rates and frequencies in units
/// of the reference linewidth.
///
/// Missing keys in a parameter file fall back to the reference point:
/// `omega = (7, 4, 1)`, zero detunings, `gamma_level = (6, 1, 1)`,
/// `gamma_branch = (1, 1, 0)` and unit dipoles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Rabi frequencies of the 1-2, 2-3 and 3-4 drives.
    #[serde(default = "SystemParams::default_omega")]
    pub omega: [f64; 3],
    /// Laser detunings of the three drives.
    #[serde(default)]
    pub delta: [f64; 3],
    /// Total decay rates of levels 2, 3 and 4.
    #[serde(default = "SystemParams::default_gamma_level")]
    pub gamma_level: [f64; 3],
    /// Branching rates 3->2, 4->3 and 4->2.
    #[serde(default = "SystemParams::default_gamma_branch")]
    pub gamma_branch: [f64; 3],
    /// Dipole-moment magnitudes of the three transitions.
    #[serde(default = "SystemParams::default_mu")]
    pub mu: [f64; 3],
    /// Skip the population-conservation check.
    #[serde(default)]
    pub allow_open_system: bool,
}

impl SystemParams {
    fn default_omega() -> [f64; 3] {
        [7.0, 4.0, 1.0]
    }
    fn default_gamma_level() -> [f64; 3] {
        [6.0, 1.0, 1.0]
    }
    fn default_gamma_branch() -> [f64; 3] {
        [1.0, 1.0, 0.0]
    }
    fn default_mu() -> [f64; 3] {
        [1.0, 1.0, 1.0]
    }

    /// Reference decay constants (G2=6, G3=G4=1, g23=g34=1, g24=0) at
    /// three-photon resonance with the given Rabi frequencies.
    pub fn reference(omega: [f64; 3]) -> Self {
        Self {
            omega,
            ..Self::default()
        }
    }

    /// Every parameter set to zero.
    pub fn zero() -> Self {
        Self {
            omega: [0.0; 3],
            delta: [0.0; 3],
            gamma_level: [0.0; 3],
            gamma_branch: [0.0; 3],
            mu: [0.0; 3],
            allow_open_system: false,
        }
    }

    pub fn with_omega(mut self, omega: [f64; 3]) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_delta(mut self, delta: [f64; 3]) -> Self {
        self.delta = delta;
        self
    }

    pub fn g2(&self) -> f64 {
        self.gamma_level[0]
    }
    pub fn g3(&self) -> f64 {
        self.gamma_level[1]
    }
    pub fn g4(&self) -> f64 {
        self.gamma_level[2]
    }
    pub fn g23(&self) -> f64 {
        self.gamma_branch[0]
    }
    pub fn g34(&self) -> f64 {
        self.gamma_branch[1]
    }
    pub fn g24(&self) -> f64 {
        self.gamma_branch[2]
    }

    /// Checks the invariants and wraps the parameters.
    pub fn validate(self) -> Result<ValidatedParams> {
        validate_params(self)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega: Self::default_omega(),
            delta: [0.0; 3],
            gamma_level: Self::default_gamma_level(),
            gamma_branch: Self::default_gamma_branch(),
            mu: Self::default_mu(),
            allow_open_system: false,
        }
    }
}

/// One constraint that validation evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: &'static str,
    /// Signed residual (closure constraints) or the checked value itself.
    pub value: f64,
    pub passed: bool,
}

/// Parameters that passed [`validate_params`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedParams {
    params: SystemParams,
    checks: Vec<ConstraintCheck>,
}

impl ValidatedParams {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn checks(&self) -> &[ConstraintCheck] {
        &self.checks
    }

    pub fn into_inner(self) -> SystemParams {
        self.params
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.params
    }
}

type Accessor = fn(&SystemParams) -> f64;

const NONNEGATIVE: [(&str, Accessor); 12] = [
    ("omega1", |p| p.omega[0]),
    ("omega2", |p| p.omega[1]),
    ("omega3", |p| p.omega[2]),
    ("gamma2", |p| p.gamma_level[0]),
    ("gamma3", |p| p.gamma_level[1]),
    ("gamma4", |p| p.gamma_level[2]),
    ("gamma23", |p| p.gamma_branch[0]),
    ("gamma34", |p| p.gamma_branch[1]),
    ("gamma24", |p| p.gamma_branch[2]),
    ("mu12", |p| p.mu[0]),
    ("mu23", |p| p.mu[1]),
    ("mu34", |p| p.mu[2]),
];

/// Validates a parameter set: finiteness, non-negative rates, couplings and
/// dipoles, and (unless overridden) the closure constraints
/// `G3 = g23` and `G4 = g34 + g24` that conserve total population.
pub fn validate_params(p: SystemParams) -> Result<ValidatedParams> {
    let mut checks = Vec::with_capacity(NONNEGATIVE.len() + 2);
    for (name, get) in NONNEGATIVE {
        let value = get(&p);
        if !value.is_finite() {
            return Err(Error::NonFinite { name });
        }
        if value < 0.0 {
            return Err(Error::NegativeRate { name, value });
        }
        checks.push(ConstraintCheck {
            name,
            value,
            passed: true,
        });
    }
    for (k, d) in p.delta.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::NonFinite {
                name: ["delta1", "delta2", "delta3"][k],
            });
        }
    }

    let closures = [
        ("gamma3 - gamma23", p.g3() - p.g23()),
        ("gamma4 - gamma34 - gamma24", p.g4() - p.g34() - p.g24()),
    ];
    for (constraint, residual) in closures {
        let passed = residual.abs() <= CLOSURE_TOL;
        if !passed && !p.allow_open_system {
            return Err(Error::TraceLeak {
                constraint,
                residual,
            });
        }
        checks.push(ConstraintCheck {
            name: constraint,
            value: residual,
            passed,
        });
    }
    Ok(ValidatedParams { params: p, checks })
}
