//! Exact elimination over the rationals and the Gaussian rationals.
//!
//! Every kernel clears denominators row by row and eliminates fraction-free
//! over the integers or the Gaussian integers, where each intermediate is a
//! minor of the scaled matrix. Rationals reappear only in the final
//! normalization.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::dense::Matrix;
use super::linalg::{RankRevealing, Threshold};
use super::scalar::{GaussRational, Rational, Scalar};
use crate::error::{Error, Result};

/// Reduced row echelon form and pivot columns by textbook elimination in the
/// field itself. Only meaningful for exact scalars, where zero tests are
/// equality tests; the fraction-free kernels below are checked against it.
pub fn rref<S: Scalar>(m: &Matrix<S>) -> (Matrix<S>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = a[(r, j)].clone();
                a[(r, j)] = a[(p, j)].clone();
                a[(p, j)] = tmp;
            }
        }
        let inv = S::one() / a[(r, c)].clone();
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Integral domains with exact division, as needed by fraction-free
/// elimination.
trait Domain: Clone + Zero + One + std::ops::Neg<Output = Self> {
    /// `self / d`, where `d` is known to divide `self`.
    fn exact_div(&self, d: &Self) -> Self;
}

impl Domain for BigInt {
    fn exact_div(&self, d: &Self) -> Self {
        self / d
    }
}

/// Gaussian integers.
type GaussInt = Complex<BigInt>;

impl Domain for GaussInt {
    fn exact_div(&self, d: &Self) -> Self {
        let norm = d.norm_sqr();
        let p = self * &d.conj();
        GaussInt::new(p.re / &norm, p.im / &norm)
    }
}

/// Exact fields whose matrices can be scaled to a [`Domain`].
pub trait ExactField: Scalar {
    #[doc(hidden)]
    type Int: Clone + Zero + One + std::ops::Neg<Output = Self::Int>;

    /// Multiplies each row by the common denominator of its entries.
    /// Returns the integral rows and the product of the multipliers.
    #[doc(hidden)]
    fn integral_rows(m: &Matrix<Self>) -> (Vec<Vec<Self::Int>>, BigInt);

    #[doc(hidden)]
    fn embed(x: BigInt) -> Self::Int;

    #[doc(hidden)]
    fn ratio(num: &Self::Int, den: &Self::Int) -> Self;

    #[doc(hidden)]
    fn eliminate(a: Vec<Vec<Self::Int>>, cols: usize, full: bool) -> Elimination<Self::Int>;
}

/// Outcome of fraction-free elimination.
#[doc(hidden)]
pub struct Elimination<T> {
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    /// Product of the row swaps' signs times the last pivot; the determinant
    /// of a square input.
    det: T,
}

/// Fraction-free elimination. With `full`, rows above each pivot are cleared
/// too (Gauss–Jordan), leaving every pivot equal to the final one.
fn eliminate<T: Domain>(mut a: Vec<Vec<T>>, cols: usize, full: bool) -> Elimination<T>
where
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T> + std::ops::Sub<&'a T, Output = T>,
{
    let rows = a.len();
    let mut prev = T::one();
    let mut negate = false;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let r = pivots.len();
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            negate = !negate;
        }
        let pivot_row = std::mem::take(&mut a[r]);
        let (lo, hi) = if full { (0, rows) } else { (r + 1, rows) };
        for (i, row) in a.iter_mut().enumerate().take(hi).skip(lo) {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            for j in 0..cols {
                if j == c {
                    continue;
                }
                let v = &(&pivot_row[c] * &row[j]) - &(&factor * &pivot_row[j]);
                row[j] = v.exact_div(&prev);
            }
            row[c] = T::zero();
        }
        prev = pivot_row[c].clone();
        a[r] = pivot_row;
        pivots.push(c);
    }
    let det = if rows == cols && pivots.len() == rows {
        if negate {
            -prev
        } else {
            prev
        }
    } else {
        T::zero()
    };
    Elimination { rows: a, pivots, det }
}

fn lcm_of<'a>(dens: impl Iterator<Item = &'a BigInt>) -> BigInt {
    dens.fold(BigInt::one(), |acc, d| acc.lcm(d))
}

impl ExactField for Rational {
    type Int = BigInt;

    fn integral_rows(m: &Matrix<Self>) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..m.rows())
            .map(|i| {
                let lcm = lcm_of(m.row(i).iter().map(|q| q.denom()));
                let row = m.row(i).iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
                scale *= lcm;
                row
            })
            .collect();
        (rows, scale)
    }

    fn embed(x: BigInt) -> BigInt {
        x
    }

    fn ratio(num: &BigInt, den: &BigInt) -> Self {
        Rational::new(num.clone(), den.clone())
    }

    fn eliminate(a: Vec<Vec<BigInt>>, cols: usize, full: bool) -> Elimination<BigInt> {
        eliminate(a, cols, full)
    }
}

impl ExactField for GaussRational {
    type Int = GaussInt;

    fn integral_rows(m: &Matrix<Self>) -> (Vec<Vec<GaussInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..m.rows())
            .map(|i| {
                let lcm = lcm_of(m.row(i).iter().flat_map(|z| [z.re.denom(), z.im.denom()]));
                let row = m
                    .row(i)
                    .iter()
                    .map(|z| GaussInt::new(z.re.numer() * (&lcm / z.re.denom()), z.im.numer() * (&lcm / z.im.denom())))
                    .collect();
                scale *= lcm;
                row
            })
            .collect();
        (rows, scale)
    }

    fn embed(x: BigInt) -> GaussInt {
        GaussInt::new(x, BigInt::zero())
    }

    fn ratio(num: &GaussInt, den: &GaussInt) -> Self {
        let norm = den.norm_sqr();
        let p = num * den.conj();
        GaussRational::new(Rational::new(p.re, norm.clone()), Rational::new(p.im, norm))
    }

    fn eliminate(a: Vec<Vec<GaussInt>>, cols: usize, full: bool) -> Elimination<GaussInt> {
        eliminate(a, cols, full)
    }
}

/// Scales row `i` of `a` by `l[i]` and column `j` of `b` by `r[j]`, so that
/// both become integral, and multiplies the integer matrices. Entry `(i, j)`
/// of the true product is the integer entry over `l[i]·r[j]`.
fn scaled_product<T: Scalar, I, D>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    dens: impl Fn(&T) -> D,
    to_int: impl Fn(&T, &BigInt) -> I,
) -> (Vec<I>, Vec<BigInt>, Vec<BigInt>)
where
    D: IntoIterator<Item = BigInt>,
    I: Clone + Zero,
    for<'x> &'x I: std::ops::Mul<&'x I, Output = I>,
{
    let l: Vec<BigInt> = (0..a.rows())
        .map(|i| a.row(i).iter().flat_map(&dens).fold(BigInt::one(), |acc, d| acc.lcm(&d)))
        .collect();
    let r: Vec<BigInt> = (0..b.cols())
        .map(|j| (0..b.rows()).flat_map(|k| dens(&b[(k, j)])).fold(BigInt::one(), |acc, d| acc.lcm(&d)))
        .collect();
    let ai: Vec<I> = (0..a.rows())
        .flat_map(|i| a.row(i).iter().map(|x| to_int(x, &l[i])).collect::<Vec<_>>())
        .collect();
    let bi: Vec<I> = (0..b.rows())
        .flat_map(|k| (0..b.cols()).map(|j| to_int(&b[(k, j)], &r[j])).collect::<Vec<_>>())
        .collect();
    let (m, inner, p) = (a.rows(), a.cols(), b.cols());
    let mut out = vec![I::zero(); m * p];
    for i in 0..m {
        for k in 0..inner {
            let x = &ai[i * inner + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..p {
                let y = &bi[k * p + j];
                if !y.is_zero() {
                    out[i * p + j] = out[i * p + j].clone() + x * y;
                }
            }
        }
    }
    (out, l, r)
}

pub(super) fn rational_product(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Matrix<Rational> {
    let (out, l, r) = scaled_product(a, b, |q| [q.denom().clone()], |q, s| q.numer() * (s / q.denom()));
    let p = b.cols();
    Matrix::from_fn(a.rows(), p, |i, j| Rational::new(out[i * p + j].clone(), &l[i] * &r[j]))
}

pub(super) fn gauss_product(a: &Matrix<GaussRational>, b: &Matrix<GaussRational>) -> Matrix<GaussRational> {
    let (out, l, r) = scaled_product(
        a,
        b,
        |z| [z.re.denom().clone(), z.im.denom().clone()],
        |z, s| GaussInt::new(z.re.numer() * (s / z.re.denom()), z.im.numer() * (s / z.im.denom())),
    );
    let p = b.cols();
    Matrix::from_fn(a.rows(), p, |i, j| {
        let d = &l[i] * &r[j];
        let z = &out[i * p + j];
        GaussRational::new(Rational::new(z.re.clone(), d.clone()), Rational::new(z.im.clone(), d))
    })
}

/// Reduced row echelon form by fraction-free Gauss–Jordan elimination.
pub fn reduced_echelon<S: ExactField>(m: &Matrix<S>) -> (Matrix<S>, Vec<usize>) {
    let (rows, _) = S::integral_rows(m);
    let e = S::eliminate(rows, m.cols(), true);
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for (r, &c) in e.pivots.iter().enumerate() {
        let pivot = &e.rows[r][c];
        for j in 0..m.cols() {
            if !e.rows[r][j].is_zero() {
                out[(r, j)] = S::ratio(&e.rows[r][j], pivot);
            }
        }
    }
    (out, e.pivots)
}

/// Exact rank.
pub fn exact_rank<S: ExactField>(m: &Matrix<S>) -> usize {
    let (rows, _) = S::integral_rows(m);
    S::eliminate(rows, m.cols(), false).pivots.len()
}

/// Exact determinant of a square matrix.
pub fn exact_det<S: ExactField>(m: &Matrix<S>) -> S {
    let (rows, scale) = S::integral_rows(m);
    let e = S::eliminate(rows, m.cols(), false);
    S::ratio(&e.det, &S::embed(scale))
}

/// Echelon basis of the right null space: one column per free variable.
pub fn echelon_null_space<S: ExactField>(m: &Matrix<S>) -> Matrix<S> {
    let n = m.cols();
    let (r, pivots) = reduced_echelon(m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Matrix::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[(f, k)] = S::one();
        for (row, &p) in pivots.iter().enumerate() {
            basis[(p, k)] = -r[(row, f)].clone();
        }
    }
    basis
}

fn exact_solve<S: ExactField>(m: &Matrix<S>, rhs: &Matrix<S>) -> Result<Matrix<S>> {
    let n = m.cols();
    let k = rhs.cols();
    let aug = Matrix::hcat(m.rows(), &[m, rhs])?;
    let (r, pivots) = reduced_echelon(&aug);
    let mut xp = Matrix::zeros(n, k);
    for (row, &p) in pivots.iter().enumerate() {
        if p < n {
            for j in 0..k {
                xp[(p, j)] = r[(row, n + j)].clone();
            }
        }
    }
    if pivots.iter().any(|&p| p >= n) {
        let residual = (&(m * &xp) - rhs).frobenius_norm();
        return Err(Error::Inconsistent { residual });
    }
    let null = echelon_null_space(m);
    if null.cols() == 0 {
        return Ok(xp);
    }
    // Project the particular solution onto the row space: x = xp − N (NᴴN)⁻¹ Nᴴ xp.
    let nh = null.adjoint();
    let gram = &nh * &null;
    let coeffs = exact_solve(&gram, &(&nh * &xp))?;
    Ok(&xp - &(&null * &coeffs))
}

impl RankRevealing for Rational {
    fn rank_with(m: &Matrix<Self>, _: Threshold) -> usize {
        exact_rank(m)
    }

    fn null_space_with(m: &Matrix<Self>, _: Threshold) -> Matrix<Self> {
        echelon_null_space(m)
    }

    fn det_of(m: &Matrix<Self>) -> Self {
        exact_det(m)
    }

    fn solve_of(m: &Matrix<Self>, rhs: &Matrix<Self>, _: f64) -> Result<Matrix<Self>> {
        exact_solve(m, rhs)
    }
}

impl RankRevealing for GaussRational {
    fn rank_with(m: &Matrix<Self>, _: Threshold) -> usize {
        if m.data().iter().all(|z| z.im.is_zero()) {
            return exact_rank(&m.map(|z| z.re.clone()));
        }
        exact_rank(m)
    }

    fn null_space_with(m: &Matrix<Self>, _: Threshold) -> Matrix<Self> {
        echelon_null_space(m)
    }

    fn det_of(m: &Matrix<Self>) -> Self {
        exact_det(m)
    }

    fn solve_of(m: &Matrix<Self>, rhs: &Matrix<Self>, _: f64) -> Result<Matrix<Self>> {
        exact_solve(m, rhs)
    }
}
