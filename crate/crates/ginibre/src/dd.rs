//! Double-double arithmetic: an unevaluated sum `hi + lo` of two f64 values
//! with `|lo| <= ulp(hi)/2`, giving roughly 106 bits of mantissa.
//!
//! Only what the rest of the crate needs is provided: field operations,
//! sqrt, exp, ln, sin/cos, atan2 and decimal parsing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

pub const DD_PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
pub const DD_PI_2: Dd = Dd { hi: std::f64::consts::FRAC_PI_2, lo: 6.123233995736766e-17 };
pub const DD_2PI: Dd = Dd { hi: std::f64::consts::TAU, lo: 2.4492935982947064e-16 };
pub const DD_LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// 2^-104.
    pub const EPSILON: Dd = Dd { hi: 4.930380657631324e-32, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub const fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let p = two_prod(self.hi, b);
        quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    #[inline]
    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        let p = two_prod(self.hi, self.hi);
        quick_two_sum(p.hi, p.lo + 2.0 * self.hi * self.lo + self.lo * self.lo)
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            quick_two_sum(hi, self.lo.floor())
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + Dd::from_f64(0.5)).floor()
    }

    pub fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            -(-self).floor()
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return Dd::ZERO;
            }
            return Dd::from_f64(f64::NAN);
        }
        let y = Dd::from_f64(self.hi.sqrt());
        y + (self - y.sqr()) / y.mul_f64(2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / DD_LN2.hi).round();
        let r = (self - DD_LN2.mul_f64(k)).ldexp(-10);
        // expm1(r) by Taylor, |r| < 3.4e-4
        let mut term = r;
        let mut s = r;
        for n in 2..=12 {
            term = (term * r) / Dd::from_f64(n as f64);
            s += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return Dd::from_f64(f64::NEG_INFINITY);
            }
            return Dd::from_f64(f64::NAN);
        }
        if !self.hi.is_finite() {
            return self;
        }
        let mut x = Dd::from_f64(self.hi.ln());
        x = x + self * (-x).exp() - Dd::ONE;
        x
    }

    /// sin and cos of |r| <= pi/4 by Taylor series.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r.sqr();
        let mut term = r;
        let mut s = r;
        let mut n = 1.0;
        loop {
            term = -(term * r2) / Dd::from_f64((n + 1.0) * (n + 2.0));
            s += term;
            n += 2.0;
            if term.hi.abs() < 1e-35 || n > 60.0 {
                break;
            }
        }
        let mut term = Dd::ONE;
        let mut c = Dd::ONE;
        let mut n = 0.0;
        loop {
            term = -(term * r2) / Dd::from_f64((n + 1.0) * (n + 2.0));
            c += term;
            n += 2.0;
            if term.hi.abs() < 1e-35 || n > 60.0 {
                break;
            }
        }
        (s, c)
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        if !self.is_finite() {
            return (Dd::from_f64(f64::NAN), Dd::from_f64(f64::NAN));
        }
        let k = (self.hi / DD_PI_2.hi).round();
        let r = self - DD_PI_2.mul_f64(k);
        let (s, c) = Dd::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn atan2(y: Dd, x: Dd) -> Dd {
        if x.hi == 0.0 && y.hi == 0.0 {
            return Dd::ZERO;
        }
        let t0 = Dd::from_f64(y.hi.atan2(x.hi));
        let (s, c) = t0.sin_cos();
        let num = y * c - x * s;
        let den = x * c + y * s;
        t0 + num / den
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            Dd::ONE / acc
        } else {
            acc
        }
    }

    /// Parses a decimal literal such as `-1.2824271291006226368753425688697917e0`.
    pub fn parse(s: &str) -> Option<Dd> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let mut acc = Dd::ZERO;
        let mut scale = 0i32;
        let mut seen_dot = false;
        let mut any = false;
        for ch in mant.chars() {
            match ch {
                '.' if !seen_dot => seen_dot = true,
                '0'..='9' => {
                    any = true;
                    acc = acc.mul_f64(10.0) + Dd::from_f64((ch as u8 - b'0') as f64);
                    if seen_dot {
                        scale -= 1;
                    }
                }
                '_' => {}
                _ => return None,
            }
        }
        if !any {
            return None;
        }
        let e = exp + scale;
        let p = Dd::from_f64(10.0).powi(e.abs());
        let v = if e >= 0 { acc * p } else { acc / p };
        Some(if neg { -v } else { v })
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e}, {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let s = two_sum(self.hi, b.hi);
        let t = two_sum(self.lo, b.lo);
        let u = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(u.hi, u.lo + t.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let p = two_prod(self.hi, b.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        quick_two_sum(q1, q2) + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - b * (self / b).trunc()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, b: Dd) { *self = *self $op b; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl std::iter::Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, |a, b| a + b)
    }
}

impl num_traits::Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl num_traits::One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}

impl num_traits::Num for Dd {
    type FromStrRadixErr = &'static str;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err("only radix 10 is supported");
        }
        Dd::parse(s).ok_or("invalid decimal literal")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        ((a - b).abs().to_f64()) <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn constants_are_consistent() {
        assert!(close(DD_PI.mul_f64(0.5), DD_PI_2, 1e-32));
        assert!(close(DD_PI.mul_f64(2.0), DD_2PI, 1e-32));
        assert!(close(Dd::from_f64(2.0).ln(), DD_LN2, 1e-31));
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &v in &[1e-8, 0.3, 1.0, 2.5, 17.0, 300.0, -40.0] {
            let x = Dd::parse(&format!("{v}")).unwrap() / Dd::from_f64(3.0);
            assert!((x.exp().ln() - x).abs().to_f64() < 1e-30 * x.abs().to_f64().max(1.0), "{v}");
        }
    }

    #[test]
    fn known_values() {
        // e and sqrt(2) to 34 digits
        let e = Dd::parse("2.718281828459045235360287471352662").unwrap();
        assert!(close(Dd::ONE.exp(), e, 1e-31));
        let r2 = Dd::parse("1.414213562373095048801688724209698").unwrap();
        assert!(close(Dd::from_f64(2.0).sqrt(), r2, 1e-31));
        let third = Dd::ONE / Dd::from_f64(3.0);
        assert!(close(third * Dd::from_f64(3.0), Dd::ONE, 1e-32));
    }

    #[test]
    fn trig_identities() {
        for i in 0..40 {
            let x = Dd::from_f64(-20.0 + i as f64 * 1.037) / Dd::from_f64(7.0);
            let (s, c) = x.sin_cos();
            assert!(((s.sqr() + c.sqr()) - Dd::ONE).abs().to_f64() < 1e-31);
            let t = Dd::atan2(s, c);
            let back = t.sin_cos();
            assert!((back.0 - s).abs().to_f64() < 1e-31);
            assert!((back.1 - c).abs().to_f64() < 1e-31);
        }
        // sin(pi/6) = 1/2
        let s = (DD_PI / Dd::from_f64(6.0)).sin();
        assert!(close(s, Dd::from_f64(0.5), 1e-31));
    }

    #[test]
    fn parse_handles_exponents() {
        let a = Dd::parse("1.5e-3").unwrap();
        assert!(close(a, Dd::from_f64(3.0) / Dd::from_f64(2000.0), 1e-32));
        assert!(Dd::parse("abc").is_none());
    }
}
