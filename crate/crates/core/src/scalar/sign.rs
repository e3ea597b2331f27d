use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ExactScalar, ScalarError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * rhs.as_i8())
    }
}

/// Rational enclosure `[lo, hi]` of `coeff * sqrt(radicand)`.
struct Enclosure {
    coeff: BigRational,
    radicand: BigRational,
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    fn new(coeff: BigRational, radicand: &BigUint) -> Self {
        let root = radicand.sqrt();
        let lo = BigRational::from_integer(BigInt::from(root));
        let hi = &lo + BigRational::one();
        Enclosure {
            coeff,
            radicand: BigRational::from_integer(BigInt::from(radicand.clone())),
            lo,
            hi,
        }
    }

    fn bisect(&mut self) {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        if &mid * &mid < self.radicand {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    fn bounds(&self) -> (BigRational, BigRational) {
        let a = &self.coeff * &self.lo;
        let b = &self.coeff * &self.hi;
        if self.coeff.is_negative() {
            (b, a)
        } else {
            (a, b)
        }
    }
}

impl ExactScalar {
    /// Exact sign of an algebraic value.
    ///
    /// Distinct square-free radicands are linearly independent over the
    /// rationals, so the value is zero iff no terms are stored. Otherwise
    /// each surd is enclosed in a rational interval that is bisected until
    /// the enclosure of the sum excludes zero.
    pub fn sign(&self) -> Result<Sign, ScalarError> {
        if self.has_transcendental() {
            return Err(ScalarError::TranscendentalSign(self.to_string()));
        }
        if self.is_zero() {
            return Ok(Sign::Zero);
        }
        let mut rational = BigRational::zero();
        let mut surds = Vec::new();
        for (m, c) in self.terms() {
            if m.radicand().is_one() {
                rational += c;
            } else {
                surds.push(Enclosure::new(c.clone(), m.radicand()));
            }
        }
        if surds.is_empty() {
            return Ok(if rational.is_positive() {
                Sign::Positive
            } else {
                Sign::Negative
            });
        }
        loop {
            let (mut lo, mut hi) = (rational.clone(), rational.clone());
            for s in &surds {
                let (a, b) = s.bounds();
                lo += a;
                hi += b;
            }
            if lo.is_positive() {
                return Ok(Sign::Positive);
            }
            if hi.is_negative() {
                return Ok(Sign::Negative);
            }
            for s in &mut surds {
                s.bisect();
            }
        }
    }
}
