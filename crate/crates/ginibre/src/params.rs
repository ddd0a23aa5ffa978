use crate::cplx::{from_c64, C, C64};
use crate::error::{Error, Result};
use crate::real::{Precision, Real};

/// Model parameters: matrix size N, singularity location x ∈ (0, 1), exponent
/// γ with Re γ > −2, degree shift k and working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub x: f64,
    pub gamma: C64,
    pub k: i32,
    pub precision: Precision,
}

impl ModelParams {
    pub fn new(n: usize, x: f64, gamma: C64) -> Result<Self> {
        let p = ModelParams { n, x, gamma, k: 0, precision: Precision::Double };
        p.validate()?;
        Ok(p)
    }

    pub fn real(n: usize, x: f64, gamma: f64) -> Result<Self> {
        Self::new(n, x, C64::new(gamma, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Parameter(format!("N must be at least 1, got {}", self.n)));
        }
        if !(self.x > 0.0 && self.x < 1.0) {
            return Err(Error::Parameter(format!("x must lie in (0, 1), got {}", self.x)));
        }
        if !(self.gamma.re > -2.0) || !self.gamma.im.is_finite() {
            return Err(Error::Parameter(format!("Re gamma must exceed -2, got {}", self.gamma)));
        }
        if self.k.abs() > 4 {
            return Err(Error::Parameter(format!("|k| must be at most 4, got {}", self.k)));
        }
        Ok(())
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_k(mut self, k: i32) -> Self {
        self.k = k;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_gamma(mut self, gamma: C64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn gamma_t<T: Real>(&self) -> C<T> {
        from_c64(self.gamma)
    }

    /// γ/2 in the working precision.
    pub fn half_gamma<T: Real>(&self) -> C<T> {
        self.gamma_t::<T>() * T::from_f64(0.5)
    }

    pub fn x_t<T: Real>(&self) -> T {
        T::from_f64(self.x)
    }

    pub fn n_t<T: Real>(&self) -> T {
        T::from_f64(self.n as f64)
    }
}

impl std::fmt::Display for ModelParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N={} x={} gamma={}", self.n, self.x, self.gamma)?;
        if self.k != 0 {
            write!(f, " k={}", self.k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(ModelParams::real(4, 0.0, 1.0).is_err());
        assert!(ModelParams::real(4, 1.0, 1.0).is_err());
        assert!(ModelParams::real(4, 0.5, -2.0).is_err());
        assert!(ModelParams::real(0, 0.5, 1.0).is_err());
        assert!(ModelParams::real(4, 0.5, 1.0).unwrap().with_k(5).validate().is_err());
        assert!(ModelParams::real(4, 0.5, -1.9).is_ok());
    }
}
