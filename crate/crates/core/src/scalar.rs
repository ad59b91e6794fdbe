//! Numeric field abstraction shared by the float and exact-rational modes.
//!
//! Every closed-form routine is generic over [`Scalar`]. With `f64` the sums
//! use compensated accumulation and "is zero" / "is an integer" questions are
//! answered within fixed tolerances; with [`Rational`] every answer is exact.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Tolerance for deciding that a float parameter is an integer.
pub const INTEGER_TOL: f64 = 1e-9;

/// Tolerance under which two float exponents are merged.
pub const EXPONENT_TOL: f64 = 1e-12;

/// Relative tolerance for trimming trailing float coefficients.
pub const TRIM_TOL: f64 = 1e-14;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// Exact image of a finite float (rational mode: its binary expansion).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Exactly zero (float: `== 0.0`).
    fn is_zero(&self) -> bool;

    /// The nearest integer when `self` is an integer (float: within
    /// [`INTEGER_TOL`]).
    fn as_integer(&self) -> Option<i64>;

    /// Whether two exponents denote the same exponential.
    fn same_exponent(&self, other: &Self) -> bool;

    /// Whether a coefficient counts as zero relative to `scale`, the largest
    /// coefficient magnitude of its polynomial.
    fn negligible(&self, scale: f64) -> bool;

    /// Sum in iteration order; compensated in float mode.
    fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn is_nonpositive_integer(&self) -> Option<u64> {
        match self.as_integer() {
            Some(k) if k <= 0 => Some(k.unsigned_abs()),
            _ => None,
        }
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn as_integer(&self) -> Option<i64> {
        let r = self.round();
        if (self - r).abs() <= INTEGER_TOL && r.abs() < 9.0e15 {
            Some(r as i64)
        } else {
            None
        }
    }
    fn same_exponent(&self, other: &Self) -> bool {
        (self - other).abs() <= EXPONENT_TOL
    }
    fn negligible(&self, scale: f64) -> bool {
        f64::abs(*self) <= TRIM_TOL * scale
    }
    fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(Zero::zero)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().to_i64()
        } else {
            None
        }
    }
    fn same_exponent(&self, other: &Self) -> bool {
        self == other
    }
    fn negligible(&self, _scale: f64) -> bool {
        Zero::is_zero(self)
    }
    fn sum<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Zero::zero(), |acc, x| acc + x)
    }
}

/// Parses `"12"`, `"-3"` or `"3/2"` as an exact rational. Decimal strings are
/// rejected: they have no honest exact reading.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}
