//! Sparse positivity certificates for Muntz polynomial systems.
//!
//! The crate covers evaluation of sparse polynomials `sum a_i x^{alpha_i}` with
//! real exponents, sampled T-/ET-system checks, polynomials with prescribed
//! zeros, the Karlin decomposition `f = f_* + f^*` of positive polynomials on
//! `[a, b]` and `[0, inf)`, and truncated moment problems built on top of it.

mod dd;
pub mod error;
pub mod extremal;
pub mod karlin;
pub mod linalg;
pub mod moments;
mod nnls;
pub mod polynomial;
pub mod tsystem;

pub use error::{Error, Result};
pub use polynomial::{ExponentVector, Interval, RealFunction, SparsePolynomial};
pub use tsystem::{FunctionFamily, SamplingConfig, Verdict};
