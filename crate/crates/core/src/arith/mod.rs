//! Finite fields, polynomials and Laurent scalars.

pub mod field;
pub mod fp;
pub mod laurent;
pub mod matrix;
pub mod parse;
pub mod poly;

pub use field::{Embedding, FieldCtx, FieldElement};
pub use laurent::{laurent_inverse, series_frobenius, LaurentPoly, LaurentScalar};
pub use matrix::Mat;
pub use poly::Poly;
