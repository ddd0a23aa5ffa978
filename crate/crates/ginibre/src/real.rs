//! Working-precision scalar abstraction.
//!
//! Every numerical routine is generic over [`Real`], implemented for `f64`
//! ("double") and [`Dd`] ("extended"). A computation runs entirely in one of
//! the two; [`Precision`] selects which at the API boundary.

use crate::dd::{Dd, DD_LN2, DD_PI};
use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

pub trait Real:
    num_traits::Num
    + Copy
    + Debug
    + Display
    + PartialOrd
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Approximate number of significant decimal digits.
    const DIGITS: i32;
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Unit roundoff.
    fn eps() -> Self;
    fn pi() -> Self;
    fn ln2() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;
    fn floor(self) -> Self;
    fn round(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn is_finite(self) -> bool;
    /// Parse a decimal literal at full working precision.
    fn parse_decimal(s: &str) -> Self;

    #[inline]
    fn from_i64(v: i64) -> Self {
        Self::from_f64(v as f64)
    }
    #[inline]
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    #[inline]
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    #[inline]
    fn max(self, o: Self) -> Self {
        if self >= o {
            self
        } else {
            o
        }
    }
    #[inline]
    fn min(self, o: Self) -> Self {
        if self <= o {
            self
        } else {
            o
        }
    }
    fn hypot(self, o: Self) -> Self {
        let a = self.abs();
        let b = o.abs();
        let (m, n) = if a >= b { (a, b) } else { (b, a) };
        if m == Self::zero() {
            return m;
        }
        let r = n / m;
        m * (Self::one() + r * r).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    pub fn digits(self) -> i32 {
        match self {
            Precision::Double => <f64 as Real>::DIGITS,
            Precision::Extended => <Dd as Real>::DIGITS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }

    pub fn parse(s: &str) -> Option<Precision> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Some(Precision::Double),
            "extended" => Some(Precision::Extended),
            _ => None,
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Real for f64 {
    const DIGITS: i32 = 15;
    const PRECISION: Precision = Precision::Double;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn eps() -> Self {
        f64::EPSILON / 2.0
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn ln2() -> Self {
        std::f64::consts::LN_2
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    #[inline]
    fn round(self) -> Self {
        f64::round(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn parse_decimal(s: &str) -> Self {
        s.trim().parse().expect("valid decimal literal")
    }
    fn hypot(self, o: Self) -> Self {
        f64::hypot(self, o)
    }
}

impl Real for Dd {
    const DIGITS: i32 = 31;
    const PRECISION: Precision = Precision::Extended;

    #[inline]
    fn from_f64(v: f64) -> Self {
        Dd::from_f64(v)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    #[inline]
    fn eps() -> Self {
        Dd::EPSILON
    }
    #[inline]
    fn pi() -> Self {
        DD_PI
    }
    #[inline]
    fn ln2() -> Self {
        DD_LN2
    }
    #[inline]
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        Dd::sin_cos(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        Dd::atan2(self, x)
    }
    #[inline]
    fn floor(self) -> Self {
        Dd::floor(self)
    }
    #[inline]
    fn round(self) -> Self {
        Dd::round(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        Dd::powi(self, n)
    }
    #[inline]
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
    fn parse_decimal(s: &str) -> Self {
        Dd::parse(s).expect("valid decimal literal")
    }
}
