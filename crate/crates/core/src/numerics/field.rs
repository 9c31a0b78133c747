//! Scalar fields the measures are computed over.
//!
//! Two exact fields ([`Rational`] and [`GaussianRational`]) and one
//! tolerance-based field ([`ComplexFloat`]). Algorithms are generic over
//! [`Field`]; the run-time tagged [`Scalar`](super::Scalar) wraps them for I/O.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;
pub type ComplexFloat = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    Rational,
    GaussianRational,
    ComplexFloat,
}

/// Ordered real type holding squared moduli.
pub trait RealValue:
    Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + Num + Neg<Output = Self> + ToPrimitive
{
    fn from_f64_lossy(v: f64) -> Self;
}

impl RealValue for f64 {
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

impl RealValue for BigRational {
    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }
}

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    type Real: RealValue;

    const MODE: FieldMode;
    const EXACT: bool;

    fn conj(&self) -> Self;
    fn modulus_sq(&self) -> Self::Real;
    fn real_part(&self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_complex(&self) -> Complex64;

    /// Zero test relative to a squared scale. Exact fields ignore `scale_sq`
    /// and `tol`.
    fn negligible(&self, scale_sq: &Self::Real, tol: f64) -> bool {
        let _ = (scale_sq, tol);
        self.is_zero()
    }

    /// Integer value if the scalar is a (real) integer.
    fn as_integer(&self) -> Option<BigInt> {
        None
    }
}

impl Field for BigRational {
    type Real = BigRational;
    const MODE: FieldMode = FieldMode::Rational;
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        self.clone()
    }
    fn modulus_sq(&self) -> BigRational {
        self * self
    }
    fn real_part(&self) -> BigRational {
        self.clone()
    }
    fn from_real(r: BigRational) -> Self {
        r
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn as_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.to_integer())
    }
}

impl Field for Complex64 {
    type Real = f64;
    const MODE: FieldMode = FieldMode::ComplexFloat;
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn modulus_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn real_part(&self) -> f64 {
        self.re
    }
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn negligible(&self, scale_sq: &f64, tol: f64) -> bool {
        self.norm_sqr() <= tol * tol * scale_sq
    }
}

/// `re + im·i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Div for GaussianRational {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let den = o.modulus_sq();
        assert!(!den.is_zero(), "division by zero gaussian rational");
        let num = self * o.conj();
        Self::new(num.re / &den, num.im / den)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Field for GaussianRational {
    type Real = BigRational;
    const MODE: FieldMode = FieldMode::GaussianRational;
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }
    fn modulus_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn real_part(&self) -> BigRational {
        self.re.clone()
    }
    fn from_real(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }
    fn from_i64(v: i64) -> Self {
        Self::from_real(BigRational::from_integer(BigInt::from(v)))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn as_integer(&self) -> Option<BigInt> {
        (self.im.is_zero() && self.re.is_integer()).then(|| self.re.to_integer())
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Smallest integer `>= x`.
pub fn ceil_rational(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// Absolute value for ordered reals.
pub fn real_abs<R: RealValue>(x: &R) -> R {
    if *x < R::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}
