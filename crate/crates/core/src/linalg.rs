//! Fixed-size complex linear algebra for the 15-dimensional state space.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

/// Dimension of the state vector.
pub const DIM: usize = 15;

pub type Mat15 = SMatrix<Complex64, DIM, DIM>;
pub type Vec15 = SVector<Complex64, DIM>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Maximum modulus over the entries.
pub fn max_abs(v: &Vec15) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Entrywise maximum modulus of a matrix.
pub fn max_abs_mat(m: &Mat15) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Partial-pivot LU factorization of a 15x15 complex matrix, with a
/// relative pivot threshold below which the matrix counts as singular.
pub struct Lu {
    lu: nalgebra::linalg::LU<Complex64, nalgebra::Const<DIM>, nalgebra::Const<DIM>>,
}

impl Lu {
    /// Factorizes `m`. Returns `None` when the smallest pivot is below
    /// `rel_tol` times the largest entry of `m`.
    pub fn new(m: Mat15, rel_tol: f64) -> Option<Self> {
        let scale = max_abs_mat(&m);
        if scale == 0.0 {
            return None;
        }
        let lu = m.lu();
        let u = lu.u();
        let min_pivot = (0..DIM).map(|k| u[(k, k)].norm()).fold(f64::INFINITY, f64::min);
        if !(min_pivot > rel_tol * scale) {
            return None;
        }
        Some(Self { lu })
    }

    pub fn solve(&self, rhs: &Vec15) -> Vec15 {
        // Pivots were checked at construction, so the solve cannot fail.
        self.lu.solve(rhs).expect("nonsingular LU")
    }
}

/// Eigenvalues of a complex matrix via the complex Schur form.
pub fn eigenvalues(m: &Mat15) -> Vec<Complex64> {
    let schur = nalgebra::linalg::Schur::new(*m);
    let (_, t) = schur.unpack();
    (0..DIM).map(|k| t[(k, k)]).collect()
}
