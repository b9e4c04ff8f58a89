use serde::{Deserialize, Serialize};

use super::distance::DistanceMatrix;
use crate::error::Result;
use crate::linalg::symmetric_eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixNorm {
    L1,
    L2,
    Operator,
}

/// Matrix norms used to compare collections of different sizes: the L¹ and
/// L² norms are averaged over the `n(n−1)` off-diagonal entries; the
/// operator norm is the largest absolute eigenvalue.
pub fn matrix_norm(d: &DistanceMatrix, kind: MatrixNorm) -> Result<f64> {
    let n = d.n();
    let pairs = (n * (n - 1)) as f64;
    Ok(match kind {
        MatrixNorm::L1 => d.values().iter().map(|v| v.abs()).sum::<f64>() / pairs,
        MatrixNorm::L2 => (d.values().iter().map(|v| v * v).sum::<f64>() / pairs).sqrt(),
        MatrixNorm::Operator => symmetric_eigenvalues(n, d.values())?
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max),
    })
}

/// Norms and triangle-test figures of one distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub l1: f64,
    pub l2: f64,
    pub operator: f64,
    /// Percentage of valid ordered triples failing the triangle inequality.
    pub fail_percent: f64,
    /// Mean ratio over failing triples, absent when none fail.
    pub average_fail: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(values: Vec<f64>) -> DistanceMatrix {
        let n = (values.len() as f64).sqrt() as usize;
        DistanceMatrix::new((0..n).map(|i| i.to_string()).collect(), values).unwrap()
    }

    #[test]
    fn examples() {
        let d = m(vec![0.0, 3.0, 3.0, 0.0]);
        assert_eq!(matrix_norm(&d, MatrixNorm::L1).unwrap(), 3.0);
        assert_eq!(matrix_norm(&d, MatrixNorm::L2).unwrap(), 3.0);
        assert!((matrix_norm(&d, MatrixNorm::Operator).unwrap() - 3.0).abs() < 1e-12);
        let z = m(vec![0.0; 9]);
        for k in [MatrixNorm::L1, MatrixNorm::L2, MatrixNorm::Operator] {
            assert_eq!(matrix_norm(&z, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn three_point_line() {
        // points 0, 1, 10: off-diagonal sum 2 * (1 + 10 + 9) = 40 over 6 entries
        let d = m(vec![0.0, 1.0, 10.0, 1.0, 0.0, 9.0, 10.0, 9.0, 0.0]);
        assert!((matrix_norm(&d, MatrixNorm::L1).unwrap() - 40.0 / 6.0).abs() < 1e-12);
        assert!((matrix_norm(&d, MatrixNorm::L2).unwrap() - (364.0f64 / 6.0).sqrt()).abs() < 1e-12);
    }
}
