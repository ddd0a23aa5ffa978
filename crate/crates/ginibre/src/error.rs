use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {0} is a pole of the gamma function")]
    GammaPole(i64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{op} did not converge (achieved residual {residual:e})")]
    Accuracy { op: &'static str, residual: f64 },

    #[error("singular moment matrix: pivot {index} has relative size {pivot:e}")]
    Singular { index: usize, pivot: f64 },

    #[error("precision escalation exhausted: condition estimate {condition:e} at extended precision")]
    EscalationExhausted { condition: f64 },

    #[error("routes disagree for {what}: {a} vs {b}")]
    Consistency { what: &'static str, a: Complex64, b: Complex64 },

    #[error("evaluation point {0} is too close to an integration contour")]
    NearContour(Complex64),

    #[error("term {0} of the differential identity is not finite")]
    Assembly(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
