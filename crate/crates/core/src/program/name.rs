//! Call-by-name evaluation into rational functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{BinOp, Constant, DeclValue, EvalError, EvalErrorKind, Expr, Role, StepProgram};
use crate::scalar::{ExactScalar, Sign};
use crate::symbolic::{integer_numerator, Polynomial, RationalFunction, Symbol};
use crate::units::{Dimension, UnitError, UnitExpr, UnitRegistry};

/// A value in symbolic mode: a rational function measured in `unit`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Value {
    rf: RationalFunction,
    unit: UnitExpr,
}

/// `polynomial > 0`, required for a step's divisor to be positive when
/// every symbol is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub step: String,
    pub polynomial: Polynomial,
}

impl Condition {
    /// Whether the condition holds at a point; `None` if a variable is
    /// unbound.
    pub fn holds_at(&self, point: &BTreeMap<String, BigRational>) -> Option<bool> {
        self.polynomial.eval(point).map(|v| v.is_positive())
    }

    /// Like [`holds_at`](Self::holds_at) at a point that also binds atoms.
    /// `None` if a variable is unbound or the sign is undecidable.
    pub fn holds_at_exact(&self, point: &BTreeMap<String, ExactScalar>) -> Option<bool> {
        let sign = self.polynomial.eval_exact(point)?.sign().ok()?;
        Some(sign == Sign::Positive)
    }
}

/// A value the rational functions cannot express, kept as an opaque
/// symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub symbol: Symbol,
    pub kind: AtomKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomKind {
    /// The nonnegative root of the radicand, which mentions only symbols
    /// and earlier atoms.
    Sqrt(RationalFunction),
    Pi,
    E,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} > 0", self.polynomial)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicStep {
    pub name: String,
    pub question: Option<String>,
    pub value: RationalFunction,
    pub unit: UnitExpr,
}

impl SymbolicStep {
    pub fn text(&self) -> String {
        render_value(&self.value, &self.unit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicResult {
    pub answer: RationalFunction,
    pub unit: UnitExpr,
    /// Symbolized helpful names that do not occur in the answer.
    pub eliminated: BTreeSet<String>,
    pub conditions: Vec<Condition>,
    pub steps: Vec<SymbolicStep>,
    /// Declaration name to the symbol standing for it.
    pub symbols: BTreeMap<String, Symbol>,
    /// Square roots and constants, in order of introduction.
    pub atoms: Vec<Atom>,
}

impl SymbolicResult {
    /// Whether `var` occurs in `rf`, directly or inside an atom.
    pub fn mentions(&self, rf: &RationalFunction, var: &str) -> bool {
        let mut pending: Vec<&RationalFunction> = vec![rf];
        let mut seen = BTreeSet::new();
        while let Some(f) = pending.pop() {
            if f.contains_var(var) {
                return true;
            }
            for atom in &self.atoms {
                if let AtomKind::Sqrt(radicand) = &atom.kind {
                    if f.contains_var(&atom.symbol.name) && seen.insert(&atom.symbol.name) {
                        pending.push(radicand);
                    }
                }
            }
        }
        false
    }

    /// Every symbol and atom bound to its exact value when each
    /// declaration takes the given value. An atom whose radicand is not a
    /// nonnegative rational there stays unbound.
    pub fn exact_point(&self, values: &BTreeMap<String, BigRational>) -> BTreeMap<String, ExactScalar> {
        let mut point: BTreeMap<String, ExactScalar> = symbol_point(&self.symbols, values)
            .into_iter()
            .map(|(k, v)| (k, ExactScalar::from_rational(v)))
            .collect();
        for atom in &self.atoms {
            let v = match &atom.kind {
                AtomKind::Sqrt(radicand) => radicand.eval_exact(&point).and_then(|r| r.sqrt().ok()),
                AtomKind::Pi => Some(ExactScalar::pi()),
                AtomKind::E => Some(ExactScalar::e()),
            };
            if let Some(v) = v {
                point.insert(atom.symbol.name.clone(), v);
            }
        }
        point
    }

    /// `8*A/(A + 8) min`.
    pub fn answer_text(&self) -> String {
        render_value(&self.answer, &self.unit)
    }
}

impl fmt::Display for SymbolicResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            if let Some(q) = &s.question {
                writeln!(f, "{q}")?;
            }
            writeln!(f, "  {} = {}", s.name, s.text())?;
        }
        write!(f, "Answer: {}", self.answer_text())?;
        for c in &self.conditions {
            write!(f, "\nCondition ({}): {c}", c.step)?;
        }
        if !self.eliminated.is_empty() {
            let names: Vec<&str> = self.eliminated.iter().map(String::as_str).collect();
            write!(f, "\nEliminated: {}", names.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn render_value(rf: &RationalFunction, unit: &UnitExpr) -> String {
    let text = rf.to_string();
    if unit.is_dimensionless() {
        return text;
    }
    let grouped = rf.den().is_one() && rf.num().term_count() > 1;
    if grouped {
        format!("({text}) {unit}")
    } else {
        format!("{text} {unit}")
    }
}

fn scale(rf: &RationalFunction, k: &BigRational) -> RationalFunction {
    if k.is_one() {
        return rf.clone();
    }
    rf.mul(&RationalFunction::constant(k.clone(), Default::default()))
}

/// Drops the monomial content and reports `None` when what is left has only
/// positive coefficients (so is positive whenever the symbols are).
fn sign_factor(p: &Polynomial) -> Option<Polynomial> {
    if p.terms().all(|(_, c)| c.is_positive()) {
        return None;
    }
    let (first, _) = p.leading()?;
    let content = p.terms().fold(first.clone(), |acc, (pp, _)| acc.gcd(pp));
    let stripped = p
        .div_exact(&Polynomial::monomial(BigRational::one(), content))
        .expect("monomial content divides");
    if stripped.as_constant().is_some() {
        return Some(p.clone());
    }
    Some(stripped)
}

fn positivity_condition(d: &RationalFunction) -> Option<Polynomial> {
    let num = sign_factor(d.num());
    let den = sign_factor(d.den());
    let p = match (num, den) {
        (None, None) => return None,
        (Some(p), None) | (None, Some(p)) => p,
        (Some(a), Some(b)) => &a * &b,
    };
    let rf = RationalFunction::from_polys(p, Polynomial::one(), Default::default()).ok()?;
    Some(integer_numerator(&rf))
}

/// `sum c_k * var^k` with `var^2` replaced by `num/den`, as a quotient of
/// polynomials.
fn reduce_square(p: &Polynomial, var: &str, num: &Polynomial, den: &Polynomial) -> (Polynomial, Polynomial) {
    let coeffs = p.coeffs_in(var);
    let top = coeffs.keys().max().map_or(0, |k| k / 2);
    let mut out = Polynomial::zero();
    for (k, c) in coeffs {
        let mut t = &c * &num.pow(k / 2);
        t = &t * &den.pow(top - k / 2);
        if k % 2 == 1 {
            t = &t * &Polynomial::var(var);
        }
        out = &out + &t;
    }
    (out, den.pow(top))
}

struct Evaluator<'a> {
    reg: &'a UnitRegistry,
    env: BTreeMap<String, Value>,
    conditions: Vec<Condition>,
    atoms: Vec<Atom>,
    letters: BTreeSet<String>,
    /// Whether roots of non-constant radicands become atoms or errors.
    open_roots: bool,
}

impl Evaluator<'_> {
    fn atom(&mut self, name: String, dim: Dimension, kind: AtomKind) -> Result<RationalFunction, EvalError> {
        if self.letters.contains(&name) {
            return Err(EvalError::new(EvalErrorKind::SymbolClash(name)));
        }
        if let Some(a) = self.atoms.iter().find(|a| a.symbol.name == name) {
            return Ok(RationalFunction::symbol(&a.symbol));
        }
        let symbol = Symbol::new(&name, dim);
        self.atoms.push(Atom {
            symbol: symbol.clone(),
            kind,
        });
        Ok(RationalFunction::symbol(&symbol))
    }

    /// An exact scalar as a combination of `sqrt(d)`, `pi` and `e` atoms.
    fn scalar(&mut self, s: &ExactScalar, dim: Dimension) -> Result<RationalFunction, EvalError> {
        if let Some(r) = s.as_rational() {
            return Ok(RationalFunction::constant(r, dim));
        }
        let none = Dimension::dimensionless();
        let mut acc = RationalFunction::constant(BigRational::from_integer(0.into()), dim.clone());
        for (m, c) in s.terms() {
            let mut t = RationalFunction::constant(c.clone(), dim.clone());
            if !m.radicand().is_one() {
                let d = BigRational::from_integer(m.radicand().clone().into());
                let radicand = RationalFunction::constant(d, none.clone());
                let name = format!("sqrt({radicand})");
                t = t.mul(&self.atom(name, none.clone(), AtomKind::Sqrt(radicand))?);
            }
            if m.pi_exp() != 0 {
                t = t.mul(&self.atom("pi".into(), none.clone(), AtomKind::Pi)?.powi(m.pi_exp() as i32)?);
            }
            if m.e_exp() != 0 {
                t = t.mul(&self.atom("e".into(), none.clone(), AtomKind::E)?.powi(m.e_exp() as i32)?);
            }
            acc = acc.checked_add(&t)?;
        }
        Ok(acc)
    }

    /// Rewrites squares of square-root atoms in terms of their radicands,
    /// latest atom first.
    fn reduce(&self, rf: RationalFunction) -> Result<RationalFunction, EvalError> {
        let mut rf = rf;
        for atom in self.atoms.iter().rev() {
            let AtomKind::Sqrt(radicand) = &atom.kind else {
                continue;
            };
            let var = atom.symbol.name.as_str();
            if rf.num().degree_in(var) < 2 && rf.den().degree_in(var) < 2 {
                continue;
            }
            let (rn, rd) = (radicand.num(), radicand.den());
            let (nn, nd) = reduce_square(rf.num(), var, rn, rd);
            let (dn, dd) = reduce_square(rf.den(), var, rn, rd);
            rf = RationalFunction::from_polys(&nn * &dd, &nd * &dn, rf.dim().clone())?;
        }
        Ok(rf)
    }

    fn eval(&mut self, e: &Expr, step: &str) -> Result<Value, EvalError> {
        let v = self.eval_raw(e, step)?;
        if self.atoms.is_empty() {
            return Ok(v);
        }
        Ok(Value {
            rf: self.reduce(v.rf)?,
            unit: v.unit,
        })
    }

    fn eval_raw(&mut self, e: &Expr, step: &str) -> Result<Value, EvalError> {
        Ok(match e {
            Expr::Lit(q) => {
                let dim = self.reg.dimension_of(&q.unit)?;
                Value {
                    rf: self.scalar(&q.magnitude, dim)?,
                    unit: q.unit.clone(),
                }
            }
            Expr::Var(v) => self.env[v].clone(),
            Expr::Const(c) => {
                let s = match c {
                    Constant::Pi => ExactScalar::pi(),
                    Constant::E => ExactScalar::e(),
                };
                Value {
                    rf: self.scalar(&s, Dimension::dimensionless())?,
                    unit: UnitExpr::dimensionless(),
                }
            }
            Expr::Sqrt(x) => {
                let v = self.eval(x, step)?;
                let unit = v
                    .unit
                    .half()
                    .ok_or_else(|| UnitError::OddExponent(v.unit.clone()))?;
                let dim = v
                    .rf
                    .dim()
                    .half()
                    .ok_or_else(|| UnitError::OddExponent(v.unit.clone()))?;
                let rf = match v.rf.as_constant() {
                    Some(c) => {
                        let root = ExactScalar::from_rational(c).sqrt().map_err(UnitError::Scalar)?;
                        self.scalar(&root, dim)?
                    }
                    None if !self.open_roots => {
                        return Err(EvalError::new(EvalErrorKind::SymbolicRadicalUnsupported(
                            format!("sqrt({x})"),
                        )))
                    }
                    None => {
                        self.require_positive(&v.rf, step);
                        let name = format!("sqrt({})", v.rf);
                        self.atom(name, dim, AtomKind::Sqrt(v.rf))?
                    }
                };
                Value { rf, unit }
            }
            Expr::Neg(x) => {
                let v = self.eval(x, step)?;
                Value {
                    rf: v.rf.neg(),
                    unit: v.unit,
                }
            }
            Expr::Pow(b, k) => {
                let v = self.eval(b, step)?;
                Value {
                    rf: v.rf.powi(*k)?,
                    unit: v.unit.powi(*k),
                }
            }
            Expr::Bin(op, l, r) => {
                let a = self.eval(l, step)?;
                let b = self.eval(r, step)?;
                self.binary(*op, a, b, step)?
            }
        })
    }

    fn require_positive(&mut self, rf: &RationalFunction, step: &str) {
        if let Some(p) = positivity_condition(rf) {
            if !self.conditions.iter().any(|c| c.polynomial == p) {
                self.conditions.push(Condition {
                    step: step.to_string(),
                    polynomial: p,
                });
            }
        }
    }

    fn binary(&mut self, op: BinOp, a: Value, b: Value, step: &str) -> Result<Value, EvalError> {
        if matches!(op, BinOp::Add | BinOp::Sub)
            && self.reg.dimension_of(&a.unit)? != self.reg.dimension_of(&b.unit)?
        {
            return Err(UnitError::IncommensurableAddition {
                left: a.unit,
                right: b.unit,
            }
            .into());
        }
        let aligned = self.reg.align(&[&a.unit, &b.unit])?;
        let (ua, fa) = &aligned[0];
        let (ub, fb) = &aligned[1];
        Ok(match op {
            BinOp::Add | BinOp::Sub => {
                let (x, y) = (scale(&a.rf, fa), scale(&b.rf, fb));
                let rf = if op == BinOp::Add {
                    x.checked_add(&y)?
                } else {
                    x.checked_sub(&y)?
                };
                Value { rf, unit: ua.clone() }
            }
            BinOp::Mul => Value {
                rf: scale(&a.rf.mul(&b.rf), &(fa * fb)),
                unit: ua.mul(ub),
            },
            BinOp::Div => {
                if b.rf.is_zero() {
                    return Err(EvalError::new(EvalErrorKind::DivisionByZero));
                }
                if let Some(c) = b.rf.as_constant() {
                    if c.is_negative() {
                        return Err(EvalError::new(EvalErrorKind::Infeasible {
                            divisor: render_value(&b.rf, &b.unit),
                        }));
                    }
                } else {
                    self.require_positive(&b.rf, step);
                }
                Value {
                    rf: scale(&a.rf, &(fa / fb)).checked_div(&b.rf)?,
                    unit: ua.div(ub),
                }
            }
        })
    }
}

/// Runs the program with symbols in place of the named declarations and of
/// any declaration whose value is already a letter. Square roots, `pi` and
/// `e` of constants become atoms; square roots over symbols are rejected.
pub fn eval_by_name(p: &StepProgram, symbolize: &BTreeSet<String>) -> Result<SymbolicResult, EvalError> {
    eval_symbolic(p, symbolize, false)
}

/// Like [`eval_by_name`], but a square root over symbols becomes an atom
/// too. Used for cross-checking against the value evaluator.
pub(crate) fn eval_by_name_open(p: &StepProgram, symbolize: &BTreeSet<String>) -> Result<SymbolicResult, EvalError> {
    eval_symbolic(p, symbolize, true)
}

fn eval_symbolic(p: &StepProgram, symbolize: &BTreeSet<String>, open_roots: bool) -> Result<SymbolicResult, EvalError> {
    for name in symbolize {
        if p.decl(name).is_none() {
            return Err(EvalError::new(EvalErrorKind::NotInput(name.clone())));
        }
    }
    let reg = p.registry();
    let mut ev = Evaluator {
        reg,
        env: BTreeMap::new(),
        conditions: Vec::new(),
        atoms: Vec::new(),
        letters: BTreeSet::new(),
        open_roots,
    };
    let mut symbols = BTreeMap::new();
    let mut letters: BTreeMap<String, String> = BTreeMap::new();
    for d in p.decls() {
        let at = |e: EvalError| e.at(&d.name, d.question.as_ref());
        let letter = match &d.value {
            DeclValue::Symbol { letter, .. } => Some(letter.clone()),
            DeclValue::Quantity(_) if symbolize.contains(&d.name) => Some(d.name.clone()),
            DeclValue::Quantity(_) => None,
        };
        let unit = d.value.unit().clone();
        let dim = reg.dimension_of(&unit).map_err(|e| at(e.into()))?;
        let rf = match (letter, &d.value) {
            (Some(letter), _) => {
                let clashes_with_name = letter != d.name && p.decl(&letter).is_some()
                    || p.step(&letter).is_some();
                let clashes_with_atom = ev.atoms.iter().any(|a| a.symbol.name == letter);
                if clashes_with_name || clashes_with_atom || letters.contains_key(&letter) {
                    return Err(at(EvalError::new(EvalErrorKind::SymbolClash(letter))));
                }
                letters.insert(letter.clone(), d.name.clone());
                ev.letters.insert(letter.clone());
                let sym = Symbol::new(&letter, dim);
                symbols.insert(d.name.clone(), sym.clone());
                RationalFunction::symbol(&sym)
            }
            (None, DeclValue::Quantity(q)) => ev.scalar(&q.magnitude, dim).map_err(at)?,
            (None, DeclValue::Symbol { .. }) => unreachable!("letters always symbolize"),
        };
        ev.env.insert(d.name.clone(), Value { rf, unit });
    }
    let mut steps = Vec::new();
    for s in p.steps() {
        let v = ev
            .eval(&s.expr, &s.name)
            .map_err(|e| e.at(&s.name, s.question.as_ref()))?;
        steps.push(SymbolicStep {
            name: s.name.clone(),
            question: s.question.clone(),
            value: v.rf.clone(),
            unit: v.unit.clone(),
        });
        ev.env.insert(s.name.clone(), v);
    }
    let answer = ev.env[p.target()].clone();
    let mut result = SymbolicResult {
        answer: answer.rf,
        unit: answer.unit,
        eliminated: BTreeSet::new(),
        conditions: ev.conditions,
        steps,
        symbols,
        atoms: ev.atoms,
    };
    result.eliminated = p
        .decls()
        .filter(|d| d.role == Role::Helpful)
        .filter_map(|d| result.symbols.get(&d.name).map(|s| (d, s)))
        .filter(|(_, s)| !result.mentions(&result.answer, &s.name))
        .map(|(d, _)| d.name.clone())
        .collect();
    Ok(result)
}

/// Point for evaluating symbolic results: each symbol's name bound to the
/// given value of the declaration it stands for.
pub(crate) fn symbol_point(
    symbols: &BTreeMap<String, Symbol>,
    values: &BTreeMap<String, BigRational>,
) -> BTreeMap<String, BigRational> {
    symbols
        .iter()
        .filter_map(|(decl, sym)| values.get(decl).map(|v| (sym.name.clone(), v.clone())))
        .collect()
}
