//! Complex numbers stored as (log-magnitude, phase).

use crate::cplx::{cis, CExt, C};
use crate::real::Real;
use std::ops::{Div, Mul};

/// exp(log_mag + i·phase), phase kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex<T: Real> {
    pub log_mag: T,
    pub phase: T,
}

pub fn wrap_phase<T: Real>(p: T) -> T {
    let pi = T::pi();
    let two_pi = pi + pi;
    if p > -pi && p <= pi {
        return p;
    }
    let k = ((p + pi) / two_pi).floor();
    let mut q = p - k * two_pi;
    if q <= -pi {
        q += two_pi;
    }
    if q > pi {
        q -= two_pi;
    }
    q
}

impl<T: Real> LogComplex<T> {
    pub fn new(log_mag: T, phase: T) -> Self {
        LogComplex { log_mag, phase: wrap_phase(phase) }
    }

    pub fn one() -> Self {
        LogComplex { log_mag: T::zero(), phase: T::zero() }
    }

    /// From a nonzero complex value.
    pub fn from_complex(z: C<T>) -> Self {
        let l = z.cln();
        LogComplex { log_mag: l.re, phase: l.im }
    }

    /// From an unwrapped complex logarithm.
    pub fn from_log(l: C<T>) -> Self {
        Self::new(l.re, l.im)
    }

    pub fn ln(self) -> C<T> {
        C::new(self.log_mag, self.phase)
    }

    pub fn to_complex(self) -> C<T> {
        cis(self.phase) * self.log_mag.exp()
    }

    pub fn inv(self) -> Self {
        Self::new(-self.log_mag, -self.phase)
    }

    /// Principal square root: phase halved into (−π/2, π/2].
    pub fn sqrt(self) -> Self {
        let h = T::from_f64(0.5);
        LogComplex { log_mag: self.log_mag * h, phase: self.phase * h }
    }

    pub fn to_f64(self) -> LogComplex<f64> {
        LogComplex { log_mag: self.log_mag.to_f64(), phase: self.phase.to_f64() }
    }

    pub fn is_finite(self) -> bool {
        self.log_mag.is_finite() && self.phase.is_finite()
    }
}

impl<T: Real> Mul for LogComplex<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.log_mag + o.log_mag, self.phase + o.phase)
    }
}

impl<T: Real> Div for LogComplex<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self::new(self.log_mag - o.log_mag, self.phase - o.phase)
    }
}

impl<T: Real> std::fmt::Display for LogComplex<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exp({} + {}i)", self.log_mag, self.phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::c;

    #[test]
    fn phase_wraps_into_half_open_interval() {
        let pi = std::f64::consts::PI;
        assert_eq!(wrap_phase(pi), pi);
        assert!((wrap_phase(-pi) - pi).abs() < 1e-15);
        assert!((wrap_phase(3.0 * pi + 0.1) - (-pi + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn products_match_complex_arithmetic() {
        let a: C<f64> = c(-1.5, 0.2);
        let b: C<f64> = c(-0.3, -2.0);
        let p = (LogComplex::from_complex(a) * LogComplex::from_complex(b)).to_complex();
        assert!((p - a * b).norm() < 1e-14);
        let q = (LogComplex::from_complex(a) / LogComplex::from_complex(b)).to_complex();
        assert!((q - a / b).norm() < 1e-14);
        let s = LogComplex::from_complex(a).sqrt().to_complex();
        assert!((s - a.sqrt()).norm() < 1e-14);
    }
}
