use super::dense::Matrix;
use super::scalar::Scalar;
use crate::error::Result;

/// Where the floating rank cut-off sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Singular values above `tol · σ_max` count.
    Relative(f64),
    /// Singular values above this absolute value count.
    Absolute(f64),
}

/// Rank-revealing kernels. Floating scalars go through the SVD; exact
/// scalars through elimination. Exact implementations ignore thresholds.
pub trait RankRevealing: Scalar {
    fn rank_with(m: &Matrix<Self>, threshold: Threshold) -> usize;

    /// Columns span the right null space: orthonormal for floating scalars,
    /// echelon (one free variable set to 1 per column) for exact ones.
    fn null_space_with(m: &Matrix<Self>, threshold: Threshold) -> Matrix<Self>;

    /// Determinant of a square matrix.
    fn det_of(m: &Matrix<Self>) -> Self;

    /// Particular solution of `m·x = rhs`, minimum-norm when `m` is rank
    /// deficient.
    fn solve_of(m: &Matrix<Self>, rhs: &Matrix<Self>, tol: f64) -> Result<Matrix<Self>>;
}

impl<S: RankRevealing> Matrix<S> {
    pub fn rank(&self, tol: f64) -> usize {
        S::rank_with(self, Threshold::Relative(tol))
    }

    pub fn rank_abs(&self, threshold: f64) -> usize {
        S::rank_with(self, Threshold::Absolute(threshold))
    }

    pub fn null_space(&self, tol: f64) -> Matrix<S> {
        S::null_space_with(self, Threshold::Relative(tol))
    }

    pub fn null_space_abs(&self, threshold: f64) -> Matrix<S> {
        S::null_space_with(self, Threshold::Absolute(threshold))
    }

    pub fn det(&self) -> Result<S> {
        if !self.is_square() {
            return Err(crate::Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(S::det_of(self))
    }

    pub fn solve(&self, rhs: &Matrix<S>, tol: f64) -> Result<Matrix<S>> {
        if rhs.rows() != self.rows() {
            return Err(crate::Error::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        S::solve_of(self, rhs, tol)
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self, tol: f64) -> Result<Matrix<S>> {
        if !self.is_square() {
            return Err(crate::Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let n = self.rows();
        if self.rank(tol) < n {
            return Err(crate::Error::Inconsistent {
                residual: f64::INFINITY,
            });
        }
        self.solve(&Matrix::identity(n), tol)
    }
}
