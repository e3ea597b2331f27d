use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{fmt_rational, ExactScalar};

/// Product of variables with positive exponents, kept sorted by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PowerProduct(Vec<(String, u32)>);

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        PowerProduct(vec![(name.to_string(), 1)])
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, u32)>) -> Self {
        let mut map: BTreeMap<String, u32> = BTreeMap::new();
        for (n, e) in pairs {
            *map.entry(n.into()).or_insert(0) += e;
        }
        PowerProduct(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0
            .iter()
            .find(|(n, _)| n == var)
            .map_or(0, |(_, e)| *e)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(n, e)| (n.as_str(), *e))
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        PowerProduct::from_pairs(
            self.0
                .iter()
                .chain(other.0.iter())
                .map(|(n, e)| (n.clone(), *e)),
        )
    }

    /// `self / other` if every exponent of `other` fits.
    pub fn div(&self, other: &PowerProduct) -> Option<PowerProduct> {
        let mut out = Vec::new();
        for (n, e) in &self.0 {
            let d = other.exponent(n);
            if d > *e {
                return None;
            }
            if e - d > 0 {
                out.push((n.clone(), e - d));
            }
        }
        if other.0.iter().any(|(n, _)| self.exponent(n) == 0) {
            return None;
        }
        Some(PowerProduct(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &PowerProduct) -> PowerProduct {
        PowerProduct(
            self.0
                .iter()
                .filter_map(|(n, e)| {
                    let m = (*e).min(other.exponent(n));
                    (m > 0).then(|| (n.clone(), m))
                })
                .collect(),
        )
    }

    /// Splits off the power of `var`.
    pub fn split(&self, var: &str) -> (u32, PowerProduct) {
        let exp = self.exponent(var);
        let rest = self.0.iter().filter(|(n, _)| n != var).cloned().collect();
        (exp, PowerProduct(rest))
    }
}

/// Lexicographic comparison with earlier variable names more significant.
fn lex_cmp(a: &PowerProduct, b: &PowerProduct) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.0.get(i), b.0.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((na, ea)), Some((nb, eb))) => match na.cmp(nb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if ea != eb {
                        return ea.cmp(eb);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

/// Graded lexicographic order.
impl Ord for PowerProduct {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| lex_cmp(self, other))
    }
}

impl PartialOrd for PowerProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<PowerProduct, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, PowerProduct::one())
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(BigRational::one(), PowerProduct::var(name))
    }

    pub fn monomial(c: BigRational, pp: PowerProduct) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(pp, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PowerProduct, BigRational)>) -> Self {
        let mut p = Polynomial::zero();
        for (pp, c) in terms {
            p.add_term(pp, c);
        }
        p
    }

    fn add_term(&mut self, pp: PowerProduct, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&pp) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&pp);
                }
            }
            None => {
                self.terms.insert(pp, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&PowerProduct, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (pp, c) = self.terms.iter().next().unwrap();
                pp.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&PowerProduct, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map_or_else(BigRational::zero, |(_, c)| c.clone())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(PowerProduct::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|pp| pp.vars().map(|(n, _)| n.to_string()))
            .collect()
    }

    pub fn contains_var(&self, var: &str) -> bool {
        self.terms.keys().any(|pp| pp.exponent(var) > 0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|pp| pp.exponent(var)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `var`, keyed by its exponent.
    pub fn coeffs_in(&self, var: &str) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (pp, c) in &self.terms {
            let (e, rest) = pp.split(var);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Coefficient of the highest power of `var`.
    pub fn leading_coeff_in(&self, var: &str) -> Polynomial {
        self.coeffs_in(var)
            .into_iter()
            .next_back()
            .map(|(_, c)| c)
            .unwrap_or_default()
    }

    pub fn scale(&self, k: &BigRational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(pp, c)| (pp.clone(), c * k)).collect(),
        }
    }

    pub fn mul_pp(&self, pp: &PowerProduct) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(p, c)| (p.mul(pp), c.clone())).collect(),
        }
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Polynomial::zero(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dpp, dc) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((lpp, lc)) = rem.leading() {
            let tpp = lpp.div(dpp)?;
            let tc = lc / dc;
            let t = Polynomial::monomial(tc, tpp);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Value at a full rational assignment; `None` if a variable is unbound.
    pub fn eval(&self, point: &BTreeMap<String, BigRational>) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (pp, c) in &self.terms {
            let mut t = c.clone();
            for (n, e) in pp.vars() {
                let v = point.get(n)?;
                t *= crate::units::pow_rational(v, e as i32);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Value at an assignment of exact scalars; `None` if a variable is
    /// unbound.
    pub fn eval_exact(&self, point: &BTreeMap<String, ExactScalar>) -> Option<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for (pp, c) in &self.terms {
            let mut t = ExactScalar::from_rational(c.clone());
            for (n, e) in pp.vars() {
                let v = point.get(n)?.pow_int(e as i64).ok()?;
                t = &t * &v;
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Least common multiple of the coefficient denominators.
    pub(crate) fn denominator_lcm(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the coefficient numerators (for integer-coefficient polynomials).
    pub(crate) fn numerator_gcd(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(num_bigint::BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    /// Rendering with an explicit choice of compact integer powers.
    pub fn render(&self, full: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (pp, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            if pp.is_one() {
                out.push_str(&fmt_rational(&mag, full));
            } else {
                if !mag.is_one() {
                    out.push_str(&fmt_rational(&mag, full));
                    out.push('*');
                }
                out.push_str(&pp.to_string());
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.alternate()))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (pp, c) in &rhs.terms {
            out.add_term(pp.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (pp, c) in &rhs.terms {
            out.add_term(pp.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                out.add_term(pa.mul(pb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }
    fn y() -> Polynomial {
        Polynomial::var("y")
    }
    fn c(n: i64) -> Polynomial {
        Polynomial::constant(BigRational::from_integer(n.into()))
    }

    #[test]
    fn graded_lex_order() {
        let ab = PowerProduct::from_pairs([("A", 1), ("B", 1)]);
        let ak = PowerProduct::from_pairs([("A", 1), ("K", 1)]);
        let bk = PowerProduct::from_pairs([("B", 1), ("K", 1)]);
        let a2 = PowerProduct::from_pairs([("A", 2)]);
        let b = PowerProduct::var("B");
        assert!(a2 > ab && ab > ak && ak > bk && bk > b && b > PowerProduct::one());
    }

    #[test]
    fn renders_in_descending_order() {
        let p = &(&(&x() * &y()) + &c(3)) - &(&x() * &x());
        assert_eq!(p.to_string(), "-x^2 + x*y + 3");
        assert_eq!(Polynomial::zero().to_string(), "0");
        let half = Polynomial::constant(BigRational::new(1.into(), 2.into()));
        assert_eq!((&half * &x()).to_string(), "1/2*x");
    }

    #[test]
    fn exact_division() {
        let f = &(&x() + &c(1)) * &(&x() - &y());
        assert_eq!(f.div_exact(&(&x() - &y())), Some(&x() + &c(1)));
        assert_eq!(f.div_exact(&(&x() + &c(2))), None);
        assert_eq!(f.div_exact(&Polynomial::zero()), None);
    }

    #[test]
    fn evaluation() {
        let p = &(&x() * &x()) + &(&c(2) * &y());
        let pt = BTreeMap::from([
            ("x".to_string(), BigRational::from_integer(3.into())),
            ("y".to_string(), BigRational::new(1.into(), 2.into())),
        ]);
        assert_eq!(p.eval(&pt), Some(BigRational::from_integer(10.into())));
        assert_eq!(p.eval(&BTreeMap::new()), None);
    }
}
