//! Quantized Painlevé Hamiltonians on polynomial spaces, their integral and
//! determinant solutions, and exact (confluent) KZ correspondence checks.

pub mod error;
pub mod hamiltonians;
pub mod hypergeom;
pub mod kz;
pub mod matrix;
pub mod matrix_fn;
pub mod ode;
pub mod poly;
pub mod scalar;
pub mod weights;

pub use error::{Error, Result};
pub use hamiltonians::{PainleveKind, ParamSet, Params};
pub use matrix::Matrix;
pub use matrix_fn::{RationalMatrixFunction, ScalarFn};
pub use poly::{Poly, RatFunc};
pub use scalar::{Gq, Real, Scalar};

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type ExactMatrixFn = RationalMatrixFunction<Gq>;
pub type ExactMatrix = Matrix<Gq>;
