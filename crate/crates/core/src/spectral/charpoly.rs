//! Characteristic polynomials over ℚ and exact recovery of roots lying in
//! ℚ(i).
//!
//! Roots are located numerically on the square-free part, snapped to nearby
//! rationals by continued fractions, and accepted only after exact
//! evaluation confirms them. A polynomial whose roots are not all in ℚ(i) is
//! reported as such rather than approximated.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matcore::{rational_to_f64, GaussRational, Matrix, Rational};

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lead) => Self::new(self.coeffs.iter().map(|c| c / lead).collect()),
            None => self.clone(),
        }
    }

    /// `x − r`.
    pub fn linear(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    /// `(x − z)(x − z̄) = x² − 2·Re z·x + |z|²`.
    pub fn conjugate_quadratic(z: &GaussRational) -> Self {
        let two = Rational::from_integer(2.into());
        Self::new(vec![
            &z.re * &z.re + &z.im * &z.im,
            -(two * &z.re),
            Rational::one(),
        ])
    }

    pub fn eval(&self, z: &GaussRational) -> GaussRational {
        self.coeffs.iter().rev().fold(GaussRational::zero(), |acc, c| {
            acc * z.clone() + GaussRational::new(c.clone(), Rational::zero())
        })
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= d) else {
            return (Self::new(Vec::new()), self.clone());
        };
        let mut quot = vec![Rational::zero(); n - d + 1];
        for k in (0..=n - d).rev() {
            let c = &rem[k + d] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic polynomial with the same roots, each simple.
    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    fn eval_f64(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Floating roots via the companion matrix, polished by Newton steps.
    /// Empty if the eigensolver does not converge.
    pub fn numeric_roots(&self) -> Vec<Complex64> {
        let monic = self.monic();
        let Some(d) = monic.degree().filter(|&d| d > 0) else {
            return Vec::new();
        };
        let c = monic.to_f64_coeffs();
        let companion = Matrix::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -c[i]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        // A stalled eigensolver leaves the roots unresolved, which callers
        // report as an unresolved factor.
        crate::matcore::float::eigenvalues(&companion)
            .unwrap_or_default()
            .iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..8 {
                    let (p, dp) = Self::eval_f64(&c, z);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    let step = p / dp;
                    if !step.re.is_finite() || !step.im.is_finite() {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect()
    }
}

/// Characteristic polynomial `det(x·I − A)` by the Faddeev–LeVerrier
/// recurrence.
///
/// The recurrence runs on the integer matrix `L·A`, `L` the common
/// denominator, where every intermediate is integral; coefficient `k` is
/// then rescaled by `L^{n−k}`.
pub fn characteristic_polynomial(a: &Matrix<Rational>) -> Poly {
    let n = a.rows();
    let l = a.data().iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let b: Vec<BigInt> = a.data().iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let matmul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = &x[i * n + k];
                if xik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += xik * &y[k * n + j];
                }
            }
        }
        out
    };
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = vec![BigInt::zero(); n * n];
    for k in 1..=n {
        let mut next = matmul(&b, &m);
        for i in 0..n {
            next[i * n + i] += &c[n - k + 1];
        }
        let am = matmul(&b, &next);
        let trace: BigInt = (0..n).map(|i| &am[i * n + i]).sum();
        c[n - k] = -trace / BigInt::from(k);
        m = next;
    }
    let mut scale = BigInt::one();
    let mut coeffs = vec![Rational::zero(); n + 1];
    for k in (0..=n).rev() {
        coeffs[k] = Rational::new(c[k].clone(), scale.clone());
        scale *= &l;
    }
    Poly::new(coeffs)
}

/// Root of a rational polynomial with its multiplicity. Complex roots are
/// reported once, by the member with positive imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRoot {
    pub value: GaussRational,
    pub multiplicity: usize,
}

/// Continued-fraction convergents of `x` within `rel_tol` of it, in order of
/// increasing denominator.
fn close_convergents(x: f64, rel_tol: f64, max: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (Some(h), Some(k)) = (
            ai.checked_mul(h1).and_then(|v| v.checked_add(h0)),
            ai.checked_mul(k1).and_then(|v| v.checked_add(k0)),
        ) else {
            break;
        };
        if k > 1_000_000_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let approx = h as f64 / k as f64;
        if (approx - x).abs() <= rel_tol * x.abs().max(1.0) {
            out.push(Rational::new(h.into(), k.into()));
            if out.len() == max {
                break;
            }
        }
        let frac = rem - a;
        if frac.abs() < 1e-300 {
            break;
        }
        rem = 1.0 / frac;
    }
    out
}

/// All roots of `p` when they lie in ℚ(i); otherwise a description of the
/// unresolved factor.
pub fn exact_roots(p: &Poly) -> Result<Vec<ExactRoot>, String> {
    if p.is_zero() {
        return Err("zero polynomial".into());
    }
    let square_free = p.square_free();
    let mut found: Vec<GaussRational> = Vec::new();
    for z in square_free.numeric_roots() {
        let scale = z.norm().max(1.0);
        if z.im < -1e-6 * scale {
            continue;
        }
        let real_parts = close_convergents(z.re, 1e-6, 4);
        let imag_parts = if z.im.abs() <= 1e-6 * scale {
            vec![Rational::zero()]
        } else {
            close_convergents(z.im, 1e-6, 4)
        };
        'search: for re in &real_parts {
            for im in &imag_parts {
                let cand = GaussRational::new(re.clone(), im.abs());
                if square_free.eval(&cand).is_zero() {
                    if !found.contains(&cand) {
                        found.push(cand);
                    }
                    break 'search;
                }
            }
        }
    }

    let mut rest = p.monic();
    let mut roots = Vec::with_capacity(found.len());
    for value in found {
        let factor = if value.im.is_zero() {
            Poly::linear(&value.re)
        } else {
            Poly::conjugate_quadratic(&value)
        };
        let mut multiplicity = 0;
        loop {
            let (q, r) = rest.div_rem(&factor);
            if !r.is_zero() {
                break;
            }
            rest = q;
            multiplicity += 1;
        }
        if multiplicity > 0 {
            roots.push(ExactRoot {
                value,
                multiplicity,
            });
        }
    }
    match rest.degree() {
        Some(0) => Ok(roots),
        Some(d) => Err(format!(
            "a degree-{d} factor of the characteristic polynomial has roots outside Q(i)"
        )),
        None => Err("zero polynomial".into()),
    }
}
