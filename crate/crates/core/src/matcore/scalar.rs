use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dense::Matrix;
use super::linalg::RankRevealing;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Complex number with exact rational real and imaginary parts.
pub type GaussRational = Complex<BigRational>;

/// Which arithmetic a matrix or pipeline runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float,
    Exact,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Float => f.write_str("float"),
            Backend::Exact => f.write_str("exact"),
        }
    }
}

/// Element type of a [`Matrix`](super::Matrix).
///
/// Exact scalars decide zero-ness by equality; floating scalars by comparing
/// the modulus against a scaled tolerance.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn conj(&self) -> Self;

    /// Absolute value, rounded to `f64`.
    fn modulus(&self) -> f64;

    fn to_c64(&self) -> Complex64;

    fn from_i64(v: i64) -> Self;

    /// Matrix product with agreeing shapes. Exact scalars override this to
    /// multiply over the integers.
    fn product(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        a.naive_product(b)
    }

    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= tol * scale
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        *self
    }

    fn modulus(&self) -> f64 {
        self.abs()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn modulus(&self) -> f64 {
        rational_to_f64(&self.abs())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn product(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        super::exact::rational_product(a, b)
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(Rational::from_i64(v), Rational::zero())
    }

    fn product(a: &Matrix<Self>, b: &Matrix<Self>) -> Matrix<Self> {
        super::exact::gauss_product(a, b)
    }
}

/// Working scalar of the eigenstructure pipeline: complex-capable, paired
/// with the real scalar type its input matrices use.
pub trait Field: Scalar + RankRevealing {
    type Real: Scalar + RankRevealing;

    fn backend() -> Backend;

    fn from_real(r: Self::Real) -> Self;

    fn from_parts(re: Self::Real, im: Self::Real) -> Self;

    fn re(&self) -> Self::Real;

    fn im(&self) -> Self::Real;

    fn real_from_rational(q: &Rational) -> Self::Real;

    /// Converts a real scalar to an exact rational. Floats convert to their
    /// exact binary value; non-finite values yield `None`.
    fn real_to_rational(r: &Self::Real) -> Option<Rational>;

    /// Maps a sampled float into this field. Exact fields snap to a dyadic
    /// grid of spacing 2^-12 to keep denominators small.
    fn real_from_f64(x: f64) -> Self::Real;

    fn from_c64(c: Complex64) -> Self {
        Self::from_parts(Self::real_from_f64(c.re), Self::real_from_f64(c.im))
    }
}

impl Field for Complex64 {
    type Real = f64;

    fn backend() -> Backend {
        Backend::Float
    }

    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn re(&self) -> f64 {
        self.re
    }

    fn im(&self) -> f64 {
        self.im
    }

    fn real_from_rational(q: &Rational) -> f64 {
        rational_to_f64(q)
    }

    fn real_to_rational(r: &f64) -> Option<Rational> {
        Rational::from_float(*r)
    }

    fn real_from_f64(x: f64) -> f64 {
        x
    }
}

impl Field for GaussRational {
    type Real = Rational;

    fn backend() -> Backend {
        Backend::Exact
    }

    fn from_real(r: Rational) -> Self {
        Complex::new(r, Rational::zero())
    }

    fn from_parts(re: Rational, im: Rational) -> Self {
        Complex::new(re, im)
    }

    fn re(&self) -> Rational {
        self.re.clone()
    }

    fn im(&self) -> Rational {
        self.im.clone()
    }

    fn real_from_rational(q: &Rational) -> Rational {
        q.clone()
    }

    fn real_to_rational(r: &Rational) -> Option<Rational> {
        Some(r.clone())
    }

    fn real_from_f64(x: f64) -> Rational {
        const GRID: f64 = 4096.0;
        let snapped = (x * GRID).round() as i64;
        Rational::new(BigInt::from(snapped), BigInt::from(GRID as i64))
    }
}

/// Nearest `f64` to a rational, robust to numerators and denominators that
/// overflow `f64` individually.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let numer_bits = q.numer().bits() as i64;
    let denom_bits = q.denom().bits() as i64;
    let shift = numer_bits - denom_bits;
    let scaled = if shift > 0 {
        q / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
