//! Dense real and complex matrices over two interchangeable backends:
//! `f64` with tolerance-based rank decisions, and exact rationals.

mod dense;
pub mod exact;
pub mod float;
mod linalg;
mod scalar;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use dense::Matrix;
pub use linalg::{RankRevealing, Threshold};
pub use scalar::{format_rational, rational_to_f64, Backend, Field, GaussRational, Rational, Scalar};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every floating decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative eigenvalue merge threshold, scaled by `max(1, spectral radius)`.
    pub eigen_cluster_tol: f64,
    /// Relative rank cut-off, scaled by the largest singular value.
    pub rank_tol: f64,
    /// Absolute ceiling on imaginary residues of supposedly real quantities.
    pub realness_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eigen_cluster_tol: 1e-8,
            rank_tol: 1e-10,
            realness_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(eigen_cluster_tol: f64, rank_tol: f64, realness_tol: f64) -> Result<Self> {
        let cfg = Self {
            eigen_cluster_tol,
            rank_tol,
            realness_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eigen_cluster_tol", self.eigen_cluster_tol),
            ("rank_tol", self.rank_tol),
            ("realness_tol", self.realness_tol),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }
}

/// Real matrix on either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum RealMatrix {
    Float(Matrix<f64>),
    Exact(Matrix<Rational>),
}

/// Complex matrix on either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexMatrix {
    Float(Matrix<Complex64>),
    Exact(Matrix<GaussRational>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RealScalar {
    Float(f64),
    Exact(Rational),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComplexScalar {
    Float(Complex64),
    Exact(GaussRational),
}

fn reject_empty<S: Scalar>(m: &Matrix<S>) -> Result<()> {
    if m.is_empty() {
        Err(Error::EmptyMatrix)
    } else {
        Ok(())
    }
}

/// Exact value of every entry; fails on NaN or infinities.
pub fn exact_from_f64(m: &Matrix<f64>) -> Result<Matrix<Rational>> {
    let mut data = Vec::with_capacity(m.data().len());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            data.push(Rational::from_float(v).ok_or(Error::NonRepresentable {
                row: i,
                col: j,
                value: v,
            })?);
        }
    }
    Matrix::new(m.rows(), m.cols(), data)
}

pub fn to_f64(m: &Matrix<Rational>) -> Matrix<f64> {
    m.map(rational_to_f64)
}

impl RealMatrix {
    pub fn float(m: Matrix<f64>) -> Result<Self> {
        reject_empty(&m)?;
        exact_from_f64(&m)?;
        Ok(Self::Float(m))
    }

    pub fn exact(m: Matrix<Rational>) -> Result<Self> {
        reject_empty(&m)?;
        Ok(Self::Exact(m))
    }

    /// Exact backend from floats: each entry becomes its exact binary value,
    /// never a rounded approximation.
    pub fn exact_from_f64(m: &Matrix<f64>) -> Result<Self> {
        reject_empty(m)?;
        Ok(Self::Exact(exact_from_f64(m)?))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Self::Float(_) => Backend::Float,
            Self::Exact(_) => Backend::Exact,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Float(m) => m.shape(),
            Self::Exact(m) => m.shape(),
        }
    }

    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        match self {
            Self::Float(m) => m.rank(tol.rank_tol),
            Self::Exact(m) => m.rank(tol.rank_tol),
        }
    }

    pub fn det(&self) -> Result<RealScalar> {
        Ok(match self {
            Self::Float(m) => RealScalar::Float(m.det()?),
            Self::Exact(m) => RealScalar::Exact(m.det()?),
        })
    }

    pub fn to_float(&self) -> Matrix<f64> {
        match self {
            Self::Float(m) => m.clone(),
            Self::Exact(m) => to_f64(m),
        }
    }

    pub fn to_exact(&self) -> Result<Matrix<Rational>> {
        match self {
            Self::Float(m) => exact_from_f64(m),
            Self::Exact(m) => Ok(m.clone()),
        }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        match self {
            Self::Float(m) => ComplexMatrix::Float(m.map(|&x| Complex64::new(x, 0.0))),
            Self::Exact(m) => {
                ComplexMatrix::Exact(m.map(|x| GaussRational::new(x.clone(), Rational::zero())))
            }
        }
    }
}

impl ComplexMatrix {
    pub fn float(m: Matrix<Complex64>) -> Result<Self> {
        reject_empty(&m)?;
        Ok(Self::Float(m))
    }

    pub fn exact(m: Matrix<GaussRational>) -> Result<Self> {
        reject_empty(&m)?;
        Ok(Self::Exact(m))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Self::Float(_) => Backend::Float,
            Self::Exact(_) => Backend::Exact,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Float(m) => m.shape(),
            Self::Exact(m) => m.shape(),
        }
    }

    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        match self {
            Self::Float(m) => m.rank(tol.rank_tol),
            Self::Exact(m) => m.rank(tol.rank_tol),
        }
    }

    /// Basis of the right null space; `cols − rank` columns.
    pub fn null_space_basis(&self, tol: &ToleranceConfig) -> ComplexMatrix {
        match self {
            Self::Float(m) => Self::Float(m.null_space(tol.rank_tol)),
            Self::Exact(m) => Self::Exact(m.null_space(tol.rank_tol)),
        }
    }

    pub fn det(&self) -> Result<ComplexScalar> {
        Ok(match self {
            Self::Float(m) => ComplexScalar::Float(m.det()?),
            Self::Exact(m) => ComplexScalar::Exact(m.det()?),
        })
    }

    /// Solves `self · x = rhs`; `rhs` is converted to this matrix's backend.
    pub fn solve_linear(&self, rhs: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
        match self {
            Self::Float(m) => Ok(Self::Float(m.solve(&rhs.to_float(), tol.rank_tol)?)),
            Self::Exact(m) => Ok(Self::Exact(m.solve(&rhs.to_exact()?, tol.rank_tol)?)),
        }
    }

    pub fn to_float(&self) -> Matrix<Complex64> {
        match self {
            Self::Float(m) => m.clone(),
            Self::Exact(m) => m.map(Scalar::to_c64),
        }
    }

    pub fn to_exact(&self) -> Result<Matrix<GaussRational>> {
        match self {
            Self::Float(m) => {
                let re = exact_from_f64(&m.map(|z| z.re))?;
                let im = exact_from_f64(&m.map(|z| z.im))?;
                Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
                    GaussRational::new(re[(i, j)].clone(), im[(i, j)].clone())
                }))
            }
            Self::Exact(m) => Ok(m.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn rank_examples() {
        let tol = ToleranceConfig::default();
        let id = RealMatrix::float(Matrix::identity(3)).unwrap();
        assert_eq!(id.rank(&tol), 3);
        let zero = RealMatrix::float(Matrix::zeros(2, 4)).unwrap();
        assert_eq!(zero.rank(&tol), 0);
        let dep = RealMatrix::exact(Matrix::from_i64(2, 2, &[1, 2, 2, 4])).unwrap();
        assert_eq!(dep.rank(&tol), 1);
    }

    #[test]
    fn empty_matrices_are_rejected() {
        assert_eq!(
            RealMatrix::float(Matrix::zeros(0, 3)),
            Err(Error::EmptyMatrix)
        );
        assert!(ComplexMatrix::exact(Matrix::zeros(2, 0)).is_err());
    }

    #[test]
    fn non_finite_entries_are_not_representable() {
        let m = Matrix::new(1, 2, vec![1.0, f64::NAN]).unwrap();
        assert!(matches!(
            RealMatrix::exact_from_f64(&m),
            Err(Error::NonRepresentable { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn null_space_examples() {
        let tol = ToleranceConfig::default();
        let zero = ComplexMatrix::float(Matrix::zeros(2, 2)).unwrap();
        let basis = zero.null_space_basis(&tol);
        assert_eq!(basis.shape(), (2, 2));
        assert_eq!(basis.rank(&tol), 2);

        let id = ComplexMatrix::exact(Matrix::identity(4)).unwrap();
        assert_eq!(id.null_space_basis(&tol).shape(), (4, 0));

        // [[1,1],[1,1]] v = 0 → v ∝ (1, −1).
        for m in [
            ComplexMatrix::float(Matrix::from_i64(2, 2, &[1, 1, 1, 1])).unwrap(),
            ComplexMatrix::exact(Matrix::from_i64(2, 2, &[1, 1, 1, 1])).unwrap(),
        ] {
            let v = m.null_space_basis(&tol).to_float();
            assert_eq!(v.cols(), 1);
            assert!((v[(0, 0)] + v[(1, 0)]).norm() < 1e-12);
            assert!(v[(0, 0)].norm() > 0.1);
        }
    }

    #[test]
    fn det_examples() {
        let id = RealMatrix::exact(Matrix::identity(5)).unwrap();
        assert_eq!(id.det().unwrap(), RealScalar::Exact(Rational::one()));
        let d = RealMatrix::float(Matrix::diagonal(&[2.0, 3.0])).unwrap();
        assert_eq!(d.det().unwrap(), RealScalar::Float(6.0));
        let rect = RealMatrix::float(Matrix::zeros(2, 3)).unwrap();
        assert!(matches!(rect.det(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let rows = vec![
            vec![3, -1, 4, 1],
            vec![5, 9, -2, 6],
            vec![5, 3, 5, -8],
            vec![9, 7, 9, 3],
        ];
        let expected = cofactor_det(&rows);
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        let exact = RealMatrix::exact(Matrix::from_i64(4, 4, &flat)).unwrap();
        assert_eq!(
            exact.det().unwrap(),
            RealScalar::Exact(Rational::from_integer(expected.into()))
        );
        let RealScalar::Float(f) = RealMatrix::float(Matrix::from_i64(4, 4, &flat))
            .unwrap()
            .det()
            .unwrap()
        else {
            unreachable!()
        };
        assert!((f - expected as f64).abs() < 1e-9 * (expected as f64).abs().max(1.0));
    }

    #[test]
    fn solve_examples() {
        let tol = ToleranceConfig::default();
        let v = ComplexMatrix::float(Matrix::from_i64(3, 1, &[1, -2, 5])).unwrap();
        let id = ComplexMatrix::float(Matrix::identity(3)).unwrap();
        let x = id.solve_linear(&v, &tol).unwrap();
        assert!((&x.to_float() - &v.to_float()).max_modulus() < 1e-14);

        let singular = ComplexMatrix::exact(Matrix::from_i64(2, 2, &[1, 1, 1, 1])).unwrap();
        let outside = ComplexMatrix::exact(Matrix::from_i64(2, 1, &[1, 0])).unwrap();
        assert!(matches!(
            singular.solve_linear(&outside, &tol),
            Err(Error::Inconsistent { .. })
        ));
        let singular_f = ComplexMatrix::float(singular.to_float()).unwrap();
        assert!(matches!(
            singular_f.solve_linear(&outside, &tol),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn solve_recovers_known_solution() {
        let m = Matrix::<Complex64>::from_i64(
            5,
            5,
            &[
                4, 1, 0, 2, -1, 1, 5, 1, 0, 0, 0, 1, 6, 1, 2, 2, 0, 1, 7, 1, -1, 0, 2, 1, 8,
            ],
        );
        let x = Matrix::column_vector(vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.25, -1.0),
            Complex64::new(3.0, 2.0),
            Complex64::new(-0.5, 0.0),
        ]);
        let rhs = &m * &x;
        let solved = m.solve(&rhs, 1e-10).unwrap();
        assert!((&solved - &x).max_modulus() < 1e-10);
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::new(1e-8, -1.0, 0.0).is_err());
        assert!(ToleranceConfig::new(1e-8, f64::NAN, 0.0).is_err());
        assert!(ToleranceConfig::new(0.0, 0.0, 0.0).is_ok());
    }
}
