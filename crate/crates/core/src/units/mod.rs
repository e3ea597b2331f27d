//! Named numbers: unit atoms, exchange rates, dimensions and quantities.
//!
//! Atoms are grouped into commensurability classes by declared exchange
//! rates. Each class is named by a representative atom and every atom
//! carries a positive rational factor to that representative. A
//! [`Dimension`] is an exponent vector over classes, so `m/cm` is
//! dimensionless once `1 m == 100 cm` has been declared.

mod expr;
mod quantity;
mod registry;
mod solve;

use num_rational::BigRational;
use thiserror::Error;

use crate::scalar::ScalarError;

pub use expr::{Dimension, UnitExpr};
pub(crate) use expr::is_identifier;
pub use quantity::Quantity;
pub use registry::{UnitRegistry, SI_BASE};
pub use solve::solve_dimensions;

pub(crate) use registry::pow_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("unit `{0}` is already declared")]
    DuplicateUnit(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("`{0}` is not a valid unit name")]
    InvalidName(String),
    #[error("inconsistent rate: 1 {lhs} is already {existing} {rhs}, not {declared} {rhs}")]
    InconsistentRate {
        lhs: String,
        rhs: String,
        existing: String,
        declared: String,
    },
    #[error("exchange rates need positive rational amounts, got {0}")]
    NonRationalRate(String),
    #[error("each side of a rate must be a single unit, got `{0}`")]
    RateNotSingleAtom(UnitExpr),
    #[error("cannot add {} and {}", show(.left), show(.right))]
    IncommensurableAddition { left: UnitExpr, right: UnitExpr },
    #[error("cannot convert {} to {}", show(.from), show(.to))]
    IncommensurableConversion { from: UnitExpr, to: UnitExpr },
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of {0} needs even unit exponents")]
    OddExponent(UnitExpr),
    #[error("no exponents make the units consistent")]
    NoSolution,
    #[error("the exponents are not determined: {0} free parameter(s)")]
    Underdetermined(usize),
    #[error("dimensional solving needs at least one basis dimension")]
    EmptyBasis,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn show(u: &UnitExpr) -> String {
    if u.is_dimensionless() {
        "plain numbers".to_string()
    } else {
        u.to_string()
    }
}

/// Exponent vector returned by [`solve_dimensions`].
pub type Exponents = Vec<BigRational>;
