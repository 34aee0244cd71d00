//! Dense linear algebra helpers bridging ndarray containers to nalgebra solvers.
//!
//! Every matrix in this crate is small (design Gram matrices and the d x d
//! information matrices), so conversions are cheap relative to the solves.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

pub fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn from_nalgebra(a: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

/// Solve the symmetric positive definite system `a x = b` by Cholesky,
/// falling back to LU when the factorization fails marginally.
pub fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let na = to_nalgebra(a);
    let nb = DVector::from_iterator(b.len(), b.iter().copied());
    let sol = match na.clone().cholesky() {
        Some(chol) => chol.solve(&nb),
        None => na
            .lu()
            .solve(&nb)
            .ok_or_else(|| Error::Singular("linear system has no solution".into()))?,
    };
    Ok(Array1::from_iter(sol.iter().copied()))
}

/// Inverse of a symmetric positive definite matrix.
pub fn inverse_spd(a: &Array2<f64>) -> Result<Array2<f64>> {
    let na = to_nalgebra(a);
    let inv = match na.clone().cholesky() {
        Some(chol) => chol.inverse(),
        None => na
            .try_inverse()
            .ok_or_else(|| Error::Singular("matrix inverse does not exist".into()))?,
    };
    Ok(from_nalgebra(&inv))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let na = to_nalgebra(a);
    let mut ev: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Locate the column whose removal most plausibly explains a failed
/// factorization: the one with the smallest diagonal pivot in a greedy
/// Cholesky sweep. Used only to make rank-deficiency errors actionable.
pub fn weakest_column(a: &Array2<f64>) -> usize {
    let n = a.nrows();
    let mut m = a.clone();
    for k in 0..n {
        let piv = m[[k, k]];
        if piv <= 1e-12 * a[[k, k]].abs().max(1.0) {
            return k;
        }
        let root = piv.sqrt();
        for i in k..n {
            m[[i, k]] /= root;
        }
        for j in (k + 1)..n {
            for i in j..n {
                m[[i, j]] -= m[[i, k]] * m[[j, k]];
            }
        }
    }
    n - 1
}
