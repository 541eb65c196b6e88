use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{Vec15, DIM};

/// Level pairs `(a, b)` such that component `k` (1-based) of the state
/// vector holds the density-matrix element `rho_ab`.
pub const COMPONENTS: [(usize, usize); DIM] = [
    (1, 2),
    (2, 3),
    (3, 4),
    (1, 3),
    (1, 4),
    (2, 4),
    (2, 2),
    (3, 3),
    (4, 4),
    (2, 1),
    (3, 2),
    (4, 3),
    (3, 1),
    (4, 1),
    (4, 2),
];

/// 1-based index of the partner component under complex conjugation.
pub fn conjugate_index(k: usize) -> usize {
    match k {
        1..=6 => k + 9,
        7..=9 => k,
        10..=15 => k - 9,
        _ => panic!("state index {k} out of range 1..=15"),
    }
}

/// Human-readable label `rhoAB` of component `k` (1-based).
pub fn component_label(k: usize) -> String {
    let (a, b) = COMPONENTS[k - 1];
    format!("rho{a}{b}")
}

/// The 15-component vector: six coherences, three excited populations and
/// the six conjugate coherences. Ground population follows from the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub Vec15);

/// Outcome of [`StateVector::check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateReport {
    pub max_pairing_error: f64,
    pub max_population_imag: f64,
    pub min_population: f64,
    pub max_population: f64,
    pub ground_population: f64,
    /// Largest `|rho_ab|^2 - rho_aa rho_bb` over the stored coherences.
    pub max_cauchy_schwarz_excess: f64,
}

impl StateVector {
    pub fn zero() -> Self {
        Self(Vec15::zeros())
    }

    pub fn from_vec(v: Vec15) -> Self {
        Self(v)
    }

    pub fn as_vec(&self) -> &Vec15 {
        &self.0
    }

    /// Component `k`, 1-based.
    pub fn get(&self, k: usize) -> Complex64 {
        self.0[k - 1]
    }

    /// Density-matrix element `rho_ab` for levels `a, b` in `1..=4`.
    pub fn rho(&self, a: usize, b: usize) -> Complex64 {
        assert!((1..=4).contains(&a) && (1..=4).contains(&b));
        if a == 1 && b == 1 {
            return Complex64::new(self.ground_population(), 0.0);
        }
        let k = COMPONENTS
            .iter()
            .position(|&pair| pair == (a, b))
            .expect("every element except rho11 is stored");
        self.0[k]
    }

    /// Populations of levels 2, 3 and 4 (real parts).
    pub fn populations(&self) -> [f64; 3] {
        [self.0[6].re, self.0[7].re, self.0[8].re]
    }

    /// `1 - rho22 - rho33 - rho44`.
    pub fn ground_population(&self) -> f64 {
        1.0 - self.0[6].re - self.0[7].re - self.0[8].re
    }

    /// Applies the conjugation involution `J conj(.)`.
    pub fn conjugate_swapped(&self) -> Self {
        let mut out = Vec15::zeros();
        for k in 1..=DIM {
            out[conjugate_index(k) - 1] = self.0[k - 1].conj();
        }
        Self(out)
    }

    pub fn check(&self) -> StateReport {
        let pairing = (1..=6)
            .map(|k| (self.get(k + 9) - self.get(k).conj()).norm())
            .fold(0.0, f64::max);
        let pops = self.populations();
        let ground = self.ground_population();
        let all = [ground, pops[0], pops[1], pops[2]];
        let excess = (1..=6)
            .map(|k| {
                let (a, b) = COMPONENTS[k - 1];
                self.get(k).norm_sqr() - self.rho(a, a).re * self.rho(b, b).re
            })
            .fold(f64::NEG_INFINITY, f64::max);
        StateReport {
            max_pairing_error: pairing,
            max_population_imag: (7..=9).map(|k| self.get(k).im.abs()).fold(0.0, f64::max),
            min_population: all.iter().copied().fold(f64::INFINITY, f64::min),
            max_population: all.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ground_population: ground,
            max_cauchy_schwarz_excess: excess,
        }
    }

    /// True when every state-vector invariant holds: conjugate pairing and
    /// real populations to `tol`, populations in `[0, 1]` up to `tol`.
    /// Coherence bounds are not part of this check (see
    /// [`StateReport::max_cauchy_schwarz_excess`]).
    pub fn is_consistent(&self, tol: f64) -> bool {
        let r = self.check();
        r.max_pairing_error <= tol
            && r.max_population_imag <= tol
            && r.min_population >= -tol
            && r.max_population <= 1.0 + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_index_is_an_involution() {
        for k in 1..=DIM {
            assert_eq!(conjugate_index(conjugate_index(k)), k);
            let (a, b) = COMPONENTS[k - 1];
            assert_eq!(COMPONENTS[conjugate_index(k) - 1], (b, a));
        }
    }

    #[test]
    fn rho_lookup_and_trace() {
        let mut v = Vec15::zeros();
        v[0] = Complex64::new(0.1, -0.2);
        v[9] = Complex64::new(0.1, 0.2);
        v[6] = Complex64::new(0.3, 0.0);
        v[7] = Complex64::new(0.2, 0.0);
        let s = StateVector(v);
        assert_eq!(s.rho(1, 2), Complex64::new(0.1, -0.2));
        assert_eq!(s.rho(2, 1), Complex64::new(0.1, 0.2));
        assert!((s.rho(1, 1).re - 0.5).abs() < 1e-15);
        assert!(s.is_consistent(1e-12));
        assert_eq!(component_label(7), "rho22");
        assert_eq!(s.conjugate_swapped(), s);
    }

    #[test]
    fn broken_pairing_is_detected() {
        let mut v = Vec15::zeros();
        v[2] = Complex64::new(0.0, 0.1);
        let s = StateVector(v);
        assert!(!s.is_consistent(1e-10));
        assert!((s.check().max_pairing_error - 0.1).abs() < 1e-15);
    }
}
