//! Exact symbolic numbers.
//!
//! An [`ExactScalar`] is a finite sum of rational multiples of monomials
//! `sqrt(d) * pi^a * e^b` with `d` square-free. The representation is kept
//! canonical after every operation, so structural equality is numeric
//! equality.

mod radical;
mod sign;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use radical::{normalize_sqrt, square_free_split};
pub use sign::Sign;
pub(crate) use text::fmt_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("square root of a negative number: {0}")]
    NegativeRadicand(String),
    #[error("square root of a non-rational value: {0}")]
    NonRationalRadicand(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot divide by a sum involving pi or e: {0}")]
    UnsupportedDenominator(String),
    #[error("the sign of a value involving pi or e is not decidable here: {0}")]
    TranscendentalSign(String),
    #[error("radicand too large to reduce to square-free form: {0}")]
    RadicandTooLarge(String),
    #[error("cannot parse number `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// `sqrt(radicand) * pi^pi_exp * e^e_exp`.
///
/// Field order matters: the derived `Ord` sorts by radicand, then the pi
/// exponent, then the e exponent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    radicand: BigUint,
    pi_exp: i64,
    e_exp: i64,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial {
            radicand: BigUint::one(),
            pi_exp: 0,
            e_exp: 0,
        }
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn pi_exp(&self) -> i64 {
        self.pi_exp
    }

    pub fn e_exp(&self) -> i64 {
        self.e_exp
    }

    pub fn is_unit(&self) -> bool {
        self.radicand.is_one() && self.pi_exp == 0 && self.e_exp == 0
    }

    pub fn is_transcendental(&self) -> bool {
        self.pi_exp != 0 || self.e_exp != 0
    }

    /// Product of two monomials as `(integer factor, monomial)`.
    /// Both radicands are square-free, so `sqrt(a)*sqrt(b) = g*sqrt(a/g * b/g)`
    /// with `g = gcd(a, b)`.
    fn mul(&self, other: &Monomial) -> (BigUint, Monomial) {
        let g = self.radicand.gcd(&other.radicand);
        let radicand = (&self.radicand / &g) * (&other.radicand / &g);
        (
            g,
            Monomial {
                radicand,
                pi_exp: self.pi_exp + other.pi_exp,
                e_exp: self.e_exp + other.e_exp,
            },
        )
    }
}

/// Canonical exact number. See the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    terms: BTreeMap<Monomial, BigRational>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::unit(), q);
        }
        ExactScalar { terms }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn fraction(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn pi() -> Self {
        Self::single(BigRational::one(), BigUint::one(), 1, 0)
    }

    pub fn e() -> Self {
        Self::single(BigRational::one(), BigUint::one(), 0, 1)
    }

    /// `coeff * sqrt(radicand) * pi^pi_exp * e^e_exp`. The radicand is
    /// reduced to square-free form.
    pub fn monomial(
        coeff: BigRational,
        radicand: BigUint,
        pi_exp: i64,
        e_exp: i64,
    ) -> Result<Self, ScalarError> {
        let (outside, inside) = square_free_split(&radicand)?;
        if inside.is_zero() {
            return Ok(Self::zero());
        }
        let coeff = coeff * BigRational::from_integer(BigInt::from(outside));
        Ok(Self::single(coeff, inside, pi_exp, e_exp))
    }

    fn single(coeff: BigRational, radicand: BigUint, pi_exp: i64, e_exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(
                Monomial {
                    radicand,
                    pi_exp,
                    e_exp,
                },
                coeff,
            );
        }
        ExactScalar { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The value as a rational, if it has no radical or transcendental part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn has_transcendental(&self) -> bool {
        self.terms.keys().any(Monomial::is_transcendental)
    }

    /// Checks every representation invariant. Used by tests.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|(m, c)| {
            !c.is_zero()
                && c.denom().is_positive()
                && c.numer().gcd(c.denom()).is_one()
                && !m.radicand.is_zero()
                && radical::is_square_free(&m.radicand)
        })
    }

    fn insert_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        ExactScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Exact quotient. Sums of surds in the divisor are rationalized by
    /// repeated conjugation; pi and e are only allowed in single-term divisors.
    pub fn checked_div(&self, rhs: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = rhs.terms.iter().next().unwrap();
            // 1/(c sqrt(d) pi^a e^b) = sqrt(d) pi^-a e^-b / (c d)
            let d = BigRational::from_integer(BigInt::from(m.radicand.clone()));
            let inv = Self::single(
                (c * d).recip(),
                m.radicand.clone(),
                -m.pi_exp,
                -m.e_exp,
            );
            return Ok(self * &inv);
        }
        if rhs.has_transcendental() {
            return Err(ScalarError::UnsupportedDenominator(rhs.to_string()));
        }
        let mut num = self.clone();
        let mut den = rhs.clone();
        while let Some(r) = den.splitting_radicand() {
            let conj = den.conjugate(&r);
            num = &num * &conj;
            den = &den * &conj;
        }
        let q = den
            .as_rational()
            .expect("rationalization leaves a rational denominator");
        Ok(num.scale(&q.recip()))
    }

    /// A radicand `r > 1` such that every radicand in `self` is either a
    /// multiple of `r` or coprime to it.
    fn splitting_radicand(&self) -> Option<BigUint> {
        let radicands: Vec<&BigUint> = self
            .terms
            .keys()
            .map(|m| &m.radicand)
            .filter(|r| !r.is_one())
            .collect();
        let mut r = (*radicands.first()?).clone();
        'refine: loop {
            for s in &radicands {
                let g = r.gcd(s);
                if !g.is_one() && g != r {
                    r = g;
                    continue 'refine;
                }
            }
            return Some(r);
        }
    }

    /// Flips the sign of every term whose radicand is divisible by `r`.
    fn conjugate(&self, r: &BigUint) -> Self {
        ExactScalar {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    if (&m.radicand % r).is_zero() {
                        (m.clone(), -c)
                    } else {
                        (m.clone(), c.clone())
                    }
                })
                .collect(),
        }
    }

    /// Integer power by repeated squaring. Negative exponents go through
    /// [`checked_div`](Self::checked_div).
    pub fn pow_int(&self, k: i64) -> Result<ExactScalar, ScalarError> {
        if k < 0 {
            let inv = Self::one().checked_div(self)?;
            return inv.pow_int(-k);
        }
        let mut base = self.clone();
        let mut exp = k as u64;
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Square root of a nonnegative rational value.
    pub fn sqrt(&self) -> Result<ExactScalar, ScalarError> {
        match self.as_rational() {
            Some(q) => normalize_sqrt(&q),
            None => Err(ScalarError::NonRationalRadicand(self.to_string())),
        }
    }
}

impl From<BigRational> for ExactScalar {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let (k, m) = ma.mul(mb);
                let c = ca * cb * BigRational::from_integer(BigInt::from(k));
                out.insert_term(m, c);
            }
        }
        out
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl fmt::Display for ExactScalar {
    /// Canonical text. `{:#}` prints large integers in full decimal digits
    /// instead of the compact `b^k` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render(self, f.alternate()))
    }
}

impl std::str::FromStr for ExactScalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse(s)
    }
}
