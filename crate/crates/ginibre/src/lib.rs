pub mod asymptotic;
pub mod cauchy;
pub mod contours;
pub mod diffid;
pub mod cplx;
pub mod dd;
pub mod fit;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod montecarlo;
pub mod orthopoly;
pub mod logc;
pub mod params;
pub mod quad;
pub mod real;
pub mod rhp;
pub mod rng;
pub mod special;
pub mod suites;

pub use error::{Error, Result};
pub use logc::LogComplex;
pub use params::ModelParams;
pub use real::{Precision, Real};
