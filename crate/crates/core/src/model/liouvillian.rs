use num_complex::Complex64;
use serde::Serialize;

use super::params::ValidatedParams;
use super::state::conjugate_index;
use crate::linalg::{Mat15, Vec15, DIM, I};

/// Sign of the inhomogeneous term `C1 = sign * i * Omega1` left behind when
/// `rho11` is eliminated through the trace condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CSign {
    #[serde(rename = "+i*omega1")]
    Plus,
    #[serde(rename = "-i*omega1")]
    Minus,
}

impl CSign {
    /// Substituting `rho11 = 1 - rho22 - rho33 - rho44` into
    /// `-i Omega1 (rho22 - rho11)` leaves `+i Omega1`.
    pub const DERIVED: CSign = CSign::Plus;

    pub fn factor(self) -> f64 {
        match self {
            CSign::Plus => 1.0,
            CSign::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CSign::Plus => "+i*omega1",
            CSign::Minus => "-i*omega1",
        }
    }
}

/// Affine generator `d psi/dt = M psi + C` of the rotating-frame dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub m: Mat15,
    pub c: Vec15,
}

/// Builds `(M, C)` with the derived sign of `C`.
pub fn build_liouvillian(p: &ValidatedParams) -> Liouvillian {
    build_liouvillian_with_sign(p, CSign::DERIVED)
}

/// Builds `(M, C)` with an explicit sign for `C`. Only the derived sign
/// yields physical steady states; the other exists to demonstrate that.
pub fn build_liouvillian_with_sign(p: &ValidatedParams, sign: CSign) -> Liouvillian {
    let [o1, o2, o3] = p.omega;
    let [d1, d2, d3] = p.delta;
    let (g2, g3, g4) = (p.g2(), p.g3(), p.g4());
    let (g23, g34, g24) = (p.g23(), p.g34(), p.g24());
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);

    let mut m = Mat15::zeros();
    let mut set = |row: usize, col: usize, v: Complex64| m[(row - 1, col - 1)] += v;

    // rho12
    set(1, 1, im(d1) - g2 / 2.0);
    set(1, 7, im(-2.0 * o1));
    set(1, 8, im(-o1));
    set(1, 9, im(-o1));
    set(1, 4, im(o2));
    // rho23
    set(2, 2, im(d2) - (g2 + g3) / 2.0);
    set(2, 4, im(-o1));
    set(2, 7, im(o2));
    set(2, 8, im(-o2));
    set(2, 6, im(o3));
    // rho34
    set(3, 3, im(d3) - (g3 + g4) / 2.0);
    set(3, 6, im(-o2));
    set(3, 8, im(o3));
    set(3, 9, im(-o3));
    // rho13
    set(4, 4, im(d1 + d2) - g3 / 2.0);
    set(4, 2, im(-o1));
    set(4, 1, im(o2));
    set(4, 5, im(o3));
    // rho14
    set(5, 5, im(d1 + d2 + d3) - g4 / 2.0);
    set(5, 6, im(-o1));
    set(5, 4, im(o3));
    // rho24
    set(6, 6, im(d2 + d3) - (g2 + g4) / 2.0);
    set(6, 5, im(-o1));
    set(6, 3, im(-o2));
    set(6, 2, im(o3));
    // rho22
    set(7, 7, re(-g2));
    set(7, 10, im(o1));
    set(7, 1, im(-o1));
    set(7, 2, im(o2));
    set(7, 11, im(-o2));
    set(7, 8, re(g23));
    set(7, 9, re(g24));
    // rho33
    set(8, 8, re(-g3));
    set(8, 3, im(o3));
    set(8, 12, im(-o3));
    set(8, 2, im(-o2));
    set(8, 11, im(o2));
    set(8, 9, re(g34));
    // rho44: only the 3-4 drive touches level 4
    set(9, 9, re(-g4));
    set(9, 3, im(-o3));
    set(9, 12, im(o3));

    // conjugate rows: M[k+9, J(j)] = conj(M[k, j])
    for k in 1..=6 {
        for j in 1..=DIM {
            let v = m[(k - 1, j - 1)];
            m[(k + 8, conjugate_index(j) - 1)] = v.conj();
        }
    }

    let mut c = Vec15::zeros();
    c[0] = I * (sign.factor() * o1);
    c[9] = c[0].conj();
    Liouvillian { m, c }
}

impl Liouvillian {
    /// `M psi + C`.
    pub fn rhs(&self, psi: &Vec15) -> Vec15 {
        self.m * psi + self.c
    }

    /// Largest entry of `J conj(M) J - M` and `J conj(C) - C`.
    pub fn symmetry_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for r in 1..=DIM {
            let rc = conjugate_index(r);
            for c in 1..=DIM {
                let cc = conjugate_index(c);
                err = err.max((self.m[(rc - 1, cc - 1)].conj() - self.m[(r - 1, c - 1)]).norm());
            }
            err = err.max((self.c[rc - 1].conj() - self.c[r - 1]).norm());
        }
        err
    }

    /// Total population rate for an arbitrary `psi`: the sum of the
    /// population rows plus the implied ground-state rate
    /// `G2 psi7 - i Omega1 (psi10 - psi1)`. Vanishes for closed systems.
    pub fn conservation_residual(&self, psi: &Vec15, p: &ValidatedParams) -> Complex64 {
        let d = self.rhs(psi);
        let ground = p.g2() * psi[6] - I * p.omega[0] * (psi[9] - psi[0]);
        d[6] + d[7] + d[8] + ground
    }

    /// Indices (1-based) whose evolution is driven, directly or through a
    /// chain of nonzero entries `M[k, j]`, by component `start`.
    pub fn influenced_by(&self, start: usize) -> Vec<usize> {
        let mut seen = [false; DIM];
        let mut stack = vec![start - 1];
        seen[start - 1] = true;
        while let Some(j) = stack.pop() {
            for (k, hit) in seen.iter_mut().enumerate() {
                if !*hit && self.m[(k, j)].norm() > 0.0 {
                    *hit = true;
                    stack.push(k);
                }
            }
        }
        (0..DIM).filter(|&k| seen[k]).map(|k| k + 1).collect()
    }
}
