//! Multivariate rational functions with exact rational coefficients.
//!
//! Symbols carry the dimension of the datum they replace, and every
//! [`RationalFunction`] is kept in lowest terms with a denominator whose
//! leading coefficient (graded-lex) is 1.

mod divmod;
mod gcd;
mod poly;
mod ratfun;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::units::Dimension;

pub use divmod::{poly_divmod, poly_rem};
pub use gcd::gcd;
pub use poly::{Polynomial, PowerProduct};
pub use ratfun::{rf_equal, RationalFunction, Symbol};
pub(crate) use ratfun::integer_numerator;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Dimension, right: Dimension },
    #[error("division by zero")]
    DivisionByZero,
    #[error("not univariate in a single symbol: {}", .0.join(", "))]
    NotUnivariate(Vec<String>),
}

pub fn rf_add(a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction, SymbolicError> {
    a.checked_add(b)
}

pub fn rf_sub(a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction, SymbolicError> {
    a.checked_sub(b)
}

pub fn rf_mul(a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
    a.mul(b)
}

pub fn rf_div(a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction, SymbolicError> {
    a.checked_div(b)
}

pub fn rf_substitute(
    f: &RationalFunction,
    bindings: &BTreeMap<Symbol, RationalFunction>,
) -> Result<RationalFunction, SymbolicError> {
    f.substitute(bindings)
}
