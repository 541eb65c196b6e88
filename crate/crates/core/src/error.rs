use thiserror::Error;

/// Errors raised by the computation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` is negative ({value})")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("parameter `{name}` is not finite")]
    NonFinite { name: &'static str },

    #[error("population leaks: {constraint} violated by {residual:e} (set allow_open_system to override)")]
    TraceLeak {
        constraint: &'static str,
        residual: f64,
    },

    #[error("Liouvillian is singular: {0}")]
    SingularLiouvillian(String),

    #[error("resolvent is singular at z = {re}{im:+}i (distance {distance:e} to an eigenvalue)")]
    ResolventSingular { re: f64, im: f64, distance: f64 },

    #[error("integration diverged at t = {t} (|psi| = {norm:e}); reduce the step size")]
    StepSizeTooLarge { t: f64, norm: f64 },

    #[error("correlation has not relaxed by tau = {tau_max}: |g - asymptote| = {residual:e}")]
    HorizonTooShort { tau_max: f64, residual: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown figure point `{0}`")]
    UnknownPoint(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NegativeRate { .. } => "NegativeRate",
            Error::NonFinite { .. } => "NonFinite",
            Error::TraceLeak { .. } => "TraceLeak",
            Error::SingularLiouvillian(_) => "SingularLiouvillian",
            Error::ResolventSingular { .. } => "ResolventSingular",
            Error::StepSizeTooLarge { .. } => "StepSizeTooLarge",
            Error::HorizonTooShort { .. } => "HorizonTooShort",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::UnknownPoint(_) => "UnknownPoint",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
