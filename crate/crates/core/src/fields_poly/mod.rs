//! Exact scalars over QQ and GF(p), and homogeneous binary forms in `s, t`.

mod form;
mod parse;
mod scalar;
mod univariate;

pub use form::BinaryForm;
pub use parse::{parse_form, ParseError};
pub use scalar::{
    is_prime, rational_string, serialize_opt_rational, serialize_rational, FieldSpec, Scalar, PRIME_LIMIT,
};
pub use univariate::UniPoly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime below 65536")]
    InvalidPrime(u32),
    #[error("denominator vanishes in the field")]
    ZeroDenominator,
    #[error("operands live over different fields")]
    Mismatch,
    #[error("degree mismatch: expected {expected}, got {got}")]
    Inhomogeneous { expected: usize, got: usize },
    #[error("a form of degree {degree} needs {} coefficients, got {got}", degree + 1)]
    CoefficientCount { degree: usize, got: usize },
    #[error("every input form is zero")]
    AllZero,
}
