//! Complex elementary functions over any [`Real`].
//!
//! `num_complex` only provides transcendental functions for `T: Float`, which
//! the double-double type is not, so the principal-branch versions used by
//! this crate live here under `c`-prefixed names.

use crate::real::Real;
use num_complex::Complex;

pub type C<T> = Complex<T>;
pub type C64 = Complex<f64>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::from_f64(re), T::from_f64(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    C::new(re, T::zero())
}

#[inline]
pub fn to_c64<T: Real>(z: C<T>) -> C64 {
    C64::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
pub fn from_c64<T: Real>(z: C64) -> C<T> {
    C::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// e^{iθ}.
#[inline]
/// sin z.
pub fn csin<T: Real>(z: C<T>) -> C<T> {
    let (s, c) = z.re.sin_cos();
    let (ep, em) = (z.im.exp(), (-z.im).exp());
    let half = T::from_f64(0.5);
    C::new(s * (ep + em) * half, c * (ep - em) * half)
}

pub fn cis<T: Real>(theta: T) -> C<T> {
    let (s, co) = theta.sin_cos();
    C::new(co, s)
}

pub trait CExt<T: Real>: Sized {
    fn cabs(self) -> T;
    fn carg(self) -> T;
    fn cexp(self) -> Self;
    /// Principal logarithm, imaginary part in (−π, π].
    fn cln(self) -> Self;
    /// Principal power exp(a·Log z); 0^a = 0 for Re a > 0.
    fn cpow(self, a: Self) -> Self;
    fn cpowr(self, a: T) -> Self;
    fn csqrt(self) -> Self;
    fn cpowi(self, n: i32) -> Self;
    fn finite(self) -> bool;
}

impl<T: Real> CExt<T> for C<T> {
    #[inline]
    fn cabs(self) -> T {
        self.re.hypot(self.im)
    }

    #[inline]
    fn carg(self) -> T {
        self.im.atan2(self.re)
    }

    #[inline]
    fn cexp(self) -> Self {
        let m = self.re.exp();
        let (s, co) = self.im.sin_cos();
        C::new(m * co, m * s)
    }

    fn cln(self) -> Self {
        let a = self.re.abs().max(self.im.abs());
        let lr = if a > T::from_f64(1e-150) && a < T::from_f64(1e150) {
            (self.re * self.re + self.im * self.im).ln() / T::from_f64(2.0)
        } else {
            self.cabs().ln()
        };
        C::new(lr, self.carg())
    }

    fn cpow(self, a: Self) -> Self {
        if self.re == T::zero() && self.im == T::zero() {
            return if a.re > T::zero() {
                C::new(T::zero(), T::zero())
            } else if a.re == T::zero() && a.im == T::zero() {
                C::new(T::one(), T::zero())
            } else {
                C::new(T::from_f64(f64::NAN), T::from_f64(f64::NAN))
            };
        }
        (a * self.cln()).cexp()
    }

    fn cpowr(self, a: T) -> Self {
        self.cpow(C::new(a, T::zero()))
    }

    fn csqrt(self) -> Self {
        let r = self.cabs();
        let two = T::from_f64(2.0);
        if r == T::zero() {
            return C::new(T::zero(), T::zero());
        }
        if self.re >= T::zero() {
            let t = ((r + self.re) / two).sqrt();
            C::new(t, self.im / (two * t))
        } else {
            let t = ((r - self.re) / two).sqrt();
            let s = if self.im < T::zero() { -t } else { t };
            C::new(self.im.abs() / (two * t), s)
        }
    }

    fn cpowi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = C::new(T::one(), T::zero());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            C::new(T::one(), T::zero()) / acc
        } else {
            acc
        }
    }

    #[inline]
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Relative distance |a − b| / max(|b|, floor).
pub fn rel_err<T: Real>(a: C<T>, b: C<T>) -> f64 {
    let d = (a - b).cabs().to_f64();
    let s = b.cabs().to_f64();
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;

    #[test]
    fn principal_branches_match_std() {
        let pts = [
            C64::new(0.3, 0.4),
            C64::new(-2.0, 1e-3),
            C64::new(-2.0, -1e-3),
            C64::new(-1.0, 0.0),
            C64::new(5.0, -7.0),
        ];
        for &z in &pts {
            assert!((z.cln() - z.ln()).norm() < 1e-15);
            assert!((z.csqrt() - z.sqrt()).norm() < 1e-15);
            assert!((z.cexp() - z.exp()).norm() < 1e-14 * z.exp().norm());
            let a = C64::new(0.5, -0.25);
            assert!((z.cpow(a) - z.powc(a)).norm() < 1e-14 * z.powc(a).norm());
        }
    }

    #[test]
    fn extended_ln_exp_roundtrip() {
        let z: C<Dd> = C::new(Dd::from_f64(-0.7), Dd::from_f64(2.3)) / cr(Dd::from_f64(3.0));
        let back = z.cln().cexp();
        assert!((back - z).cabs().to_f64() < 1e-31);
        let s = z.csqrt();
        assert!((s * s - z).cabs().to_f64() < 1e-31);
    }
}
