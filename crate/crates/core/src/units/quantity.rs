use std::fmt;

use crate::scalar::{ExactScalar, ScalarError, Sign};

use super::{UnitError, UnitExpr, UnitRegistry};

/// A named number: exact magnitude times a unit expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quantity {
    pub magnitude: ExactScalar,
    pub unit: UnitExpr,
}

impl Quantity {
    pub fn new(magnitude: ExactScalar, unit: UnitExpr) -> Self {
        Quantity { magnitude, unit }
    }

    pub fn dimensionless(magnitude: ExactScalar) -> Self {
        Quantity::new(magnitude, UnitExpr::dimensionless())
    }

    pub fn of(magnitude: impl Into<ExactScalar>, unit: &str) -> Self {
        let unit = UnitExpr::parse(unit).expect("valid unit expression");
        Quantity::new(magnitude.into(), unit)
    }

    /// Sum in the common unit (finest atom per class).
    pub fn checked_add(&self, rhs: &Quantity, reg: &UnitRegistry) -> Result<Quantity, UnitError> {
        if reg.dimension_of(&self.unit)? != reg.dimension_of(&rhs.unit)? {
            return Err(UnitError::IncommensurableAddition {
                left: self.unit.clone(),
                right: rhs.unit.clone(),
            });
        }
        let aligned = reg.align(&[&self.unit, &rhs.unit])?;
        let (unit, fa) = &aligned[0];
        let (_, fb) = &aligned[1];
        let a = &self.magnitude * &ExactScalar::from_rational(fa.clone());
        let b = &rhs.magnitude * &ExactScalar::from_rational(fb.clone());
        Ok(Quantity::new(&a + &b, unit.clone()))
    }

    pub fn checked_sub(&self, rhs: &Quantity, reg: &UnitRegistry) -> Result<Quantity, UnitError> {
        self.checked_add(&rhs.neg(), reg)
    }

    pub fn checked_mul(&self, rhs: &Quantity, reg: &UnitRegistry) -> Result<Quantity, UnitError> {
        let aligned = reg.align(&[&self.unit, &rhs.unit])?;
        let (ua, fa) = &aligned[0];
        let (ub, fb) = &aligned[1];
        let k = ExactScalar::from_rational(fa * fb);
        let mag = &(&self.magnitude * &rhs.magnitude) * &k;
        Ok(Quantity::new(mag, ua.mul(ub)))
    }

    pub fn checked_div(&self, rhs: &Quantity, reg: &UnitRegistry) -> Result<Quantity, UnitError> {
        if rhs.magnitude.is_zero() {
            return Err(UnitError::DivisionByZero);
        }
        let aligned = reg.align(&[&self.unit, &rhs.unit])?;
        let (ua, fa) = &aligned[0];
        let (ub, fb) = &aligned[1];
        let k = ExactScalar::from_rational(fa / fb);
        let mag = (&self.magnitude * &k).checked_div(&rhs.magnitude)?;
        Ok(Quantity::new(mag, ua.div(ub)))
    }

    pub fn powi(&self, k: i32) -> Result<Quantity, UnitError> {
        Ok(Quantity::new(self.magnitude.pow_int(k as i64)?, self.unit.powi(k)))
    }

    /// Square root; every unit exponent must be even.
    pub fn sqrt(&self) -> Result<Quantity, UnitError> {
        let unit = self
            .unit
            .half()
            .ok_or_else(|| UnitError::OddExponent(self.unit.clone()))?;
        Ok(Quantity::new(self.magnitude.sqrt()?, unit))
    }

    pub fn neg(&self) -> Quantity {
        Quantity::new(-&self.magnitude, self.unit.clone())
    }

    pub fn sign(&self) -> Result<Sign, ScalarError> {
        self.magnitude.sign()
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mag = if f.alternate() {
            format!("{:#}", self.magnitude)
        } else {
            self.magnitude.to_string()
        };
        let mag = if self.magnitude.term_count() > 1 && !self.unit.is_dimensionless() {
            format!("({mag})")
        } else {
            mag
        };
        if self.unit.is_dimensionless() {
            f.write_str(&mag)
        } else {
            write!(f, "{mag} {}", self.unit)
        }
    }
}
