//! SVD-backed kernels for `f64` and `Complex64` matrices.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use super::dense::Matrix;
use super::linalg::{RankRevealing, Threshold};
use super::scalar::Scalar;
use crate::error::{Error, Result};

trait FloatScalar: Scalar + ComplexField<RealField = f64> {}
impl FloatScalar for f64 {}
impl FloatScalar for Complex64 {}

fn to_na<T: FloatScalar>(m: &Matrix<T>) -> DMatrix<T> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn from_na<T: FloatScalar>(d: &DMatrix<T>) -> Matrix<T> {
    Matrix::from_fn(d.nrows(), d.ncols(), |i, j| d[(i, j)].clone())
}

/// Singular values in descending order.
pub fn singular_values<T: SvdInput>(m: &Matrix<T>) -> Vec<f64> {
    T::singular_values(m)
}

/// Scalars whose matrices admit [`singular_values`].
pub trait SvdInput: Scalar {
    fn singular_values(m: &Matrix<Self>) -> Vec<f64>;
}

impl SvdInput for f64 {
    fn singular_values(m: &Matrix<Self>) -> Vec<f64> {
        sorted_singular_values(m)
    }
}

impl SvdInput for Complex64 {
    fn singular_values(m: &Matrix<Self>) -> Vec<f64> {
        sorted_singular_values(m)
    }
}

fn sorted_singular_values<T: FloatScalar>(m: &Matrix<T>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let svd = to_na(m).svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a real square matrix from its real Schur form.
///
/// Shifted QR can stall on spectra that are symmetric about the imaginary
/// axis, so the iteration is bounded and retried on `M + σI` for a few
/// asymmetric shifts `σ`. `None` when every attempt stalls.
pub fn eigenvalues(m: &Matrix<f64>) -> Option<Vec<Complex64>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    if n == 0 {
        return Some(Vec::new());
    }
    let base = to_na(m);
    let scale = base.norm().max(1.0);
    let max_iter = 200 * n;
    for shift in [0.0, 0.1234, -0.3718, 0.5813, -1.618] {
        let sigma = shift * scale;
        let shifted = &base + DMatrix::<f64>::identity(n, n) * sigma;
        if let Some(schur) = nalgebra::linalg::Schur::try_new(shifted, f64::EPSILON, max_iter) {
            return Some(
                schur
                    .complex_eigenvalues()
                    .iter()
                    .map(|z| Complex64::new(z.re - sigma, z.im))
                    .collect(),
            );
        }
    }
    None
}

fn cutoff(sigma_max: f64, threshold: Threshold) -> f64 {
    match threshold {
        Threshold::Relative(tol) => tol * sigma_max,
        Threshold::Absolute(t) => t,
    }
}

fn float_rank<T: FloatScalar>(m: &Matrix<T>, threshold: Threshold) -> usize {
    let s = sorted_singular_values(m);
    let Some(&sigma_max) = s.first() else {
        return 0;
    };
    if sigma_max == 0.0 {
        return 0;
    }
    let cut = cutoff(sigma_max, threshold);
    s.iter().filter(|&&x| x > cut).count()
}

/// Right singular vectors (all `n` of them) ordered by descending singular
/// value, with the singular values padded by zeros to length `n`.
fn full_right_svd<T: FloatScalar>(m: &Matrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let n = m.cols();
    let r = m.rows().max(n);
    let mut padded = DMatrix::<T>::zeros(r, n);
    for i in 0..m.rows() {
        for j in 0..n {
            padded[(i, j)] = m[(i, j)].clone();
        }
    }
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&k| svd.singular_values[k]).collect();
    let v = DMatrix::from_fn(n, n, |i, k| v_t[(order[k], i)].clone().conjugate());
    (sigma, v)
}

fn float_null_space<T: FloatScalar>(m: &Matrix<T>, threshold: Threshold) -> Matrix<T> {
    let n = m.cols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if m.rows() == 0 {
        return Matrix::identity(n);
    }
    let (sigma, v) = full_right_svd(m);
    let sigma_max = sigma[0];
    let rank = if sigma_max == 0.0 {
        0
    } else {
        let cut = cutoff(sigma_max, threshold);
        sigma.iter().filter(|&&x| x > cut).count()
    };
    let basis = v.columns(rank, n - rank).into_owned();
    from_na(&basis)
}

fn float_det<T: FloatScalar>(m: &Matrix<T>) -> T {
    if m.rows() == 0 {
        return T::one();
    }
    to_na(m).determinant()
}

fn float_solve<T: FloatScalar>(m: &Matrix<T>, rhs: &Matrix<T>, tol: f64) -> Result<Matrix<T>> {
    if m.cols() == 0 || m.rows() == 0 {
        let x = Matrix::zeros(m.cols(), rhs.cols());
        let residual = rhs.frobenius_norm();
        return if residual == 0.0 {
            Ok(x)
        } else {
            Err(Error::Inconsistent { residual })
        };
    }
    let svd = to_na(m).svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(&to_na(rhs), tol * sigma_max)
        .map_err(|_| Error::Inconsistent {
            residual: f64::INFINITY,
        })?;
    let x = from_na(&x);
    let residual = (&(m * &x) - rhs).frobenius_norm();
    let limit = 10.0 * tol.max(f64::EPSILON) * (sigma_max * x.frobenius_norm() + rhs.frobenius_norm());
    if residual > limit {
        return Err(Error::Inconsistent { residual });
    }
    Ok(x)
}

impl RankRevealing for f64 {
    fn rank_with(m: &Matrix<Self>, threshold: Threshold) -> usize {
        float_rank(m, threshold)
    }

    fn null_space_with(m: &Matrix<Self>, threshold: Threshold) -> Matrix<Self> {
        float_null_space(m, threshold)
    }

    fn det_of(m: &Matrix<Self>) -> Self {
        float_det(m)
    }

    fn solve_of(m: &Matrix<Self>, rhs: &Matrix<Self>, tol: f64) -> Result<Matrix<Self>> {
        float_solve(m, rhs, tol)
    }
}

fn real_part(m: &Matrix<Complex64>) -> Option<Matrix<f64>> {
    if m.data().iter().all(|z| z.im == 0.0) {
        Some(m.map(|z| z.re))
    } else {
        None
    }
}

fn lift(m: &Matrix<f64>) -> Matrix<Complex64> {
    m.map(|&x| Complex64::new(x, 0.0))
}

// Real-valued complex matrices are routed through the real SVD so that null
// spaces of real matrices come back real, without arbitrary complex phases.
impl RankRevealing for Complex64 {
    fn rank_with(m: &Matrix<Self>, threshold: Threshold) -> usize {
        match real_part(m) {
            Some(r) => float_rank(&r, threshold),
            None => float_rank(m, threshold),
        }
    }

    fn null_space_with(m: &Matrix<Self>, threshold: Threshold) -> Matrix<Self> {
        match real_part(m) {
            Some(r) => lift(&float_null_space(&r, threshold)),
            None => float_null_space(m, threshold),
        }
    }

    fn det_of(m: &Matrix<Self>) -> Self {
        float_det(m)
    }

    fn solve_of(m: &Matrix<Self>, rhs: &Matrix<Self>, tol: f64) -> Result<Matrix<Self>> {
        match (real_part(m), real_part(rhs)) {
            (Some(mr), Some(rr)) => float_solve(&mr, &rr, tol).map(|x| lift(&x)),
            _ => float_solve(m, rhs, tol),
        }
    }
}
