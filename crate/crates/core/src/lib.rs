//! Exact verification and numerical search for integrable complex
//! structures on `g x g`, where `g` is a 3-dimensional real Lie algebra in
//! Bianchi normal form.

pub mod acs;
pub mod autmod;
pub mod classify;
pub mod error;
pub mod families;
pub mod json;
pub mod numsearch;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar, ScalarMode, DEFAULT_EPS};
