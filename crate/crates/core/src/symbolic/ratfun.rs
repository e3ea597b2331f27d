use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::{gcd, integer_primitive};
use super::poly::Polynomial;
use super::SymbolicError;
use crate::scalar::ExactScalar;
use crate::units::Dimension;

/// A named variable standing for a quantity of fixed dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub dim: Dimension,
}

impl Symbol {
    pub fn new(name: &str, dim: Dimension) -> Self {
        Symbol {
            name: name.to_string(),
            dim,
        }
    }
}

/// Normalized quotient of polynomials tagged with a dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    dim: Dimension,
}

/// Cancels the gcd and makes the denominator's leading coefficient 1.
fn normalize(num: Polynomial, den: Polynomial) -> (Polynomial, Polynomial) {
    if num.is_zero() {
        return (num, Polynomial::one());
    }
    let (num, den) = if let Some(c) = den.as_constant() {
        (num, Polynomial::constant(c))
    } else {
        let g = gcd(&num, &den);
        if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        }
    };
    let lc = den.leading_coeff().recip();
    (num.scale(&lc), den.scale(&lc))
}

impl RationalFunction {
    pub fn constant(c: BigRational, dim: Dimension) -> Self {
        RationalFunction {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
            dim,
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()), Dimension::dimensionless())
    }

    pub fn symbol(s: &Symbol) -> Self {
        RationalFunction {
            num: Polynomial::var(&s.name),
            den: Polynomial::one(),
            dim: s.dim.clone(),
        }
    }

    pub fn from_polys(num: Polynomial, den: Polynomial, dim: Dimension) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        let (num, den) = normalize(num, den);
        Ok(RationalFunction { num, den, dim })
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn dim(&self) -> &Dimension {
        &self.dim
    }

    /// Same function, retagged. Used when the caller tracks units itself.
    pub fn with_dim(mut self, dim: Dimension) -> Self {
        self.dim = dim;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.num.contains_var(name) || self.den.contains_var(name)
    }

    fn same_dim(&self, other: &Self) -> Result<(), SymbolicError> {
        if self.dim != other.dim {
            return Err(SymbolicError::DimensionMismatch {
                left: self.dim.clone(),
                right: other.dim.clone(),
            });
        }
        Ok(())
    }

    fn sum(&self, other: &Self, negate: bool) -> Result<Self, SymbolicError> {
        self.same_dim(other)?;
        let rhs_num = if negate { -&other.num } else { other.num.clone() };
        let (num, den) = if self.den == other.den {
            (&self.num + &rhs_num, self.den.clone())
        } else {
            (
                &(&self.num * &other.den) + &(&rhs_num * &self.den),
                &self.den * &other.den,
            )
        };
        Self::from_polys(num, den, self.dim.clone())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SymbolicError> {
        self.sum(other, false)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SymbolicError> {
        self.sum(other, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_polys(
            &self.num * &other.num,
            &self.den * &other.den,
            self.dim.mul(&other.dim),
        )
        .expect("product of nonzero denominators")
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, SymbolicError> {
        if other.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Self::from_polys(
            &self.num * &other.den,
            &self.den * &other.num,
            self.dim.div(&other.dim),
        )
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
            dim: self.dim.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self, SymbolicError> {
        Self::constant(BigRational::one(), Dimension::dimensionless()).checked_div(self)
    }

    pub fn powi(&self, k: i32) -> Result<Self, SymbolicError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
            dim: self.dim.powi(k),
        })
    }

    /// Value at a rational point; `None` if a variable is unbound or the
    /// denominator vanishes.
    pub fn eval(&self, point: &BTreeMap<String, BigRational>) -> Option<BigRational> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(point)? / d)
    }

    /// Value at an assignment of exact scalars; `None` if a variable is
    /// unbound or the denominator vanishes.
    pub fn eval_exact(&self, point: &BTreeMap<String, ExactScalar>) -> Option<ExactScalar> {
        let d = self.den.eval_exact(point)?;
        self.num.eval_exact(point)?.checked_div(&d).ok()
    }

    /// Simultaneous substitution of symbols.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, RationalFunction>) -> Result<Self, SymbolicError> {
        let mut by_name = BTreeMap::new();
        for (sym, value) in bindings {
            if sym.dim != value.dim {
                return Err(SymbolicError::DimensionMismatch {
                    left: sym.dim.clone(),
                    right: value.dim.clone(),
                });
            }
            by_name.insert(sym.name.as_str(), value);
        }
        let num = eval_poly(&self.num, &by_name)?;
        let den = eval_poly(&self.den, &by_name)?;
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Self::from_polys(
            &num.num * &den.den,
            &num.den * &den.num,
            self.dim.clone(),
        )
    }

    /// `num/den` with integer coefficients: `8*A/(A + 8)`.
    pub fn render(&self, full: bool) -> String {
        let scale = BigRational::from_integer(num_integer::Integer::lcm(
            &self.num.denominator_lcm(),
            &self.den.denominator_lcm(),
        ));
        let (n, d) = (self.num.scale(&scale), self.den.scale(&scale));
        let g = num_integer::Integer::gcd(&n.numerator_gcd(), &d.numerator_gcd());
        let unscale = BigRational::new(One::one(), g);
        let (mut n, mut d) = (n.scale(&unscale), d.scale(&unscale));
        // Same value with both signs flipped, if that shows fewer minus signs.
        let minus = |p: &Polynomial| p.terms().filter(|(_, c)| c.is_negative()).count();
        let (nn, nd) = (minus(&n) + minus(&d), n.term_count() + d.term_count());
        if d.as_constant().is_none() && 2 * nn > nd {
            (n, d) = (-&n, -&d);
        }
        if d.is_one() {
            return n.render(full);
        }
        let ns = n.render(full);
        let ds = d.render(full);
        let num_part = if n.term_count() > 1 { format!("({ns})") } else { ns };
        let simple_den = d.is_monomial()
            && d.leading().is_some_and(|(pp, c)| {
                pp.is_one() || (c.is_one() && pp.vars().count() == 1)
            });
        let den_part = if simple_den { ds } else { format!("({ds})") };
        format!("{num_part}/{den_part}")
    }
}

/// A polynomial evaluated in the field of rational functions, with unbound
/// variables left as themselves. Dimensions are not tracked here.
fn eval_poly(
    p: &Polynomial,
    bindings: &BTreeMap<&str, &RationalFunction>,
) -> Result<RationalFunction, SymbolicError> {
    let dimless = Dimension::dimensionless;
    let mut acc = RationalFunction::constant(BigRational::zero(), dimless());
    for (pp, c) in p.terms() {
        let mut term = RationalFunction::constant(c.clone(), dimless());
        for (name, e) in pp.vars() {
            let base = match bindings.get(name) {
                Some(v) => (*v).clone().with_dim(dimless()),
                None => RationalFunction::symbol(&Symbol::new(name, dimless())),
            };
            term = term.mul(&base.powi(e as i32)?);
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

/// Equality by cross-multiplication, ignoring dimension.
pub fn rf_equal(a: &RationalFunction, b: &RationalFunction) -> bool {
    &a.num * &b.den == &b.num * &a.den
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(f.alternate()))
    }
}

/// The numerator rescaled to integer coefficients; handy for stating sign
/// conditions without fractions.
pub(crate) fn integer_numerator(rf: &RationalFunction) -> Polynomial {
    integer_primitive(&rf.num)
}
