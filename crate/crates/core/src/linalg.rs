//! Symmetric eigenvalues for the operator norm and the PCA spectrum.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

// Off-diagonal convergence threshold of the symmetric QR iteration.
const EIGEN_EPS: f64 = 1e-14;

/// Eigenvalues of a symmetric matrix given row-major, in no particular order.
pub fn symmetric_eigenvalues(n: usize, values: &[f64]) -> Result<Vec<f64>> {
    if values.len() != n * n {
        return Err(Error::InvalidMatrix(format!(
            "{} entries for a {n}x{n} matrix",
            values.len()
        )));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let m = DMatrix::from_row_slice(n, n, values);
    let eig = SymmetricEigen::try_new(m, EIGEN_EPS, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().collect())
}
