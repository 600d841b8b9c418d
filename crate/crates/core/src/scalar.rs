//! Field abstraction shared by the arrangement enumerator and the simplex
//! solver, so both run on `f64` with tolerances or on exact rationals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

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
    /// Whether arithmetic is exact (zero tests ignore tolerances).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// Exact conversion for rationals; identity for `f64`.
    fn from_float(x: f64) -> Self;
    fn from_int(x: i64) -> Self;
    fn as_f64(&self) -> f64;
    fn abs_val(&self) -> Self;

    /// Zero test of `self` relative to the magnitude `scale` of the terms
    /// that produced it.
    fn is_negligible(&self, scale: &Self, rel: f64) -> bool;

    fn is_exact_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn sign_rel(&self, scale: &Self, rel: f64) -> i8 {
        if self.is_negligible(scale, rel) {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    /// Nearest multiple of `2^-bits`; the identity for inexact types.
    fn snap(&self, _bits: u32) -> Self {
        self.clone()
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
    fn from_float(x: f64) -> Self {
        x
    }
    fn from_int(x: i64) -> Self {
        x as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        f64::abs(*self)
    }
    fn is_negligible(&self, scale: &Self, rel: f64) -> bool {
        f64::abs(*self) <= rel * f64::abs(*scale).max(f64::MIN_POSITIVE)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_float(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite input")
    }
    fn from_int(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
    fn is_negligible(&self, _scale: &Self, _rel: f64) -> bool {
        self.is_zero()
    }
    fn snap(&self, bits: u32) -> Self {
        let unit = BigRational::from_integer(BigInt::from(1) << bits);
        (self * &unit).round() / unit
    }
}

/// `x` as an exact rational, if finite.
pub fn rational(x: f64) -> Option<BigRational> {
    <BigRational as FromPrimitive>::from_f64(x)
}

/// The rational whose decimal expansion is the shortest string that
/// round-trips to `x`, so that `0.3` becomes `3/10`.
pub fn decimal_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let text = format!("{x:e}");
    let (mantissa, exp) = text.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Dot product over any scalar field.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Sum of the absolute values of the products `a_k b_k`.
pub fn dot_scale<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| {
        acc + (x.clone() * y.clone()).abs_val()
    })
}
