//! Exact named-number arithmetic for step-question programs.
//!
//! The crate is layered bottom-up:
//!
//! * [`scalar`]: canonical exact numbers (rationals, square-free surds, pi, e);
//! * [`units`]: unit atoms, exchange rates, dimensions and quantities;
//! * [`symbolic`]: multivariate rational functions over the rationals;
//! * [`program`]: the step-program language and its two evaluators;
//! * [`worksheet`]: editable worksheet documents built from programs;
//! * [`api`]: request and response bodies of the HTTP service.

#![allow(clippy::result_large_err)]

pub mod api;
pub mod fixtures;
pub mod program;
pub mod scalar;
pub mod symbolic;
pub mod units;
pub mod worksheet;

pub use program::{parse, StepProgram};
pub use scalar::ExactScalar;
pub use units::{Dimension, Quantity, UnitExpr, UnitRegistry};
