//! Uniform and logarithmic grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a one-dimensional grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Self {
            min,
            max,
            points,
            log: false,
        }
    }

    pub fn log(min: f64, max: f64, points: usize) -> Self {
        Self {
            min,
            max,
            points,
            log: true,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.log {
            logspace(self.min, self.max, self.points)
        } else {
            linspace(self.min, self.max, self.points)
        }
    }
}

/// `n` evenly spaced points from `min` to `max` inclusive. Points are
/// computed as `min + k * step` except the last, which is exactly `max`.
pub fn linspace(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidGrid("bounds must be finite".into()));
    }
    match n {
        0 => Err(Error::InvalidGrid("grid needs at least one point".into())),
        1 if min == max => Ok(vec![min]),
        1 => Err(Error::InvalidGrid("a single-point grid needs min == max".into())),
        _ if max <= min => Err(Error::InvalidGrid(format!("max ({max}) must exceed min ({min})"))),
        _ => {
            let step = (max - min) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|k| min + k as f64 * step).collect();
            v[n - 1] = max;
            Ok(v)
        }
    }
}

/// `n` logarithmically spaced points from `min` to `max` inclusive.
pub fn logspace(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) {
        return Err(Error::InvalidGrid("log grid needs a positive lower bound".into()));
    }
    let mut v: Vec<f64> = linspace(min.ln(), max.ln(), n)?
        .into_iter()
        .map(f64::exp)
        .collect();
    v[0] = min;
    v[n - 1] = max;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints_and_spacing() {
        let v = linspace(-25.0, 25.0, 2001).unwrap();
        assert_eq!(v.len(), 2001);
        assert_eq!(v[0], -25.0);
        assert_eq!(v[2000], 25.0);
        assert_eq!(v[1000], 0.0);
        assert!((v[1] - v[0] - 0.025).abs() < 1e-12);
    }

    #[test]
    fn logspace_is_ascending() {
        let v = logspace(0.25, 50.0, 100).unwrap();
        assert_eq!(v[0], 0.25);
        assert_eq!(v[99], 50.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let ratio = v[1] / v[0];
        assert!((v[50] / v[49] - ratio).abs() < 1e-12);
    }

    #[test]
    fn bad_grids() {
        assert!(linspace(1.0, 0.0, 5).is_err());
        assert!(linspace(0.0, 1.0, 0).is_err());
        assert!(logspace(0.0, 1.0, 5).is_err());
        assert!(linspace(f64::NAN, 1.0, 5).is_err());
        assert_eq!(linspace(2.0, 2.0, 1).unwrap(), vec![2.0]);
    }
}
