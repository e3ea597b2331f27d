//! Call-by-value evaluation.

use std::collections::BTreeMap;
use std::fmt;

use super::print::{equation, quantity_is_compound};
use super::{BinOp, Constant, DeclValue, EvalError, EvalErrorKind, Expr, StepProgram};
use crate::scalar::{ExactScalar, Sign};
use crate::units::{Quantity, UnitRegistry};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub name: String,
    pub question: Option<String>,
    pub value: Quantity,
    /// The step's expression with every variable replaced by its value.
    pub equation: String,
}

/// Named-number results of a call-by-value run, one entry per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub inputs: Vec<(String, Quantity)>,
    pub entries: Vec<TraceEntry>,
    pub target: String,
    pub answer: Quantity,
}

impl Trace {
    pub fn value(&self, name: &str) -> Option<&Quantity> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.value)
            .or_else(|| self.inputs.iter().find(|(n, _)| n == name).map(|(_, q)| q))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, q) in &self.inputs {
            writeln!(f, "{name} = {q}")?;
        }
        for e in &self.entries {
            if let Some(q) = &e.question {
                writeln!(f, "{q}")?;
            }
            writeln!(f, "  {} = {} = {}", e.name, e.value, e.equation)?;
        }
        write!(f, "Answer: {} = {}", self.target, self.answer)
    }
}

pub(crate) fn value_text(q: &Quantity) -> (String, bool) {
    (q.to_string(), quantity_is_compound(q))
}

fn eval(e: &Expr, env: &BTreeMap<String, Quantity>, reg: &UnitRegistry) -> Result<Quantity, EvalError> {
    Ok(match e {
        Expr::Lit(q) => q.clone(),
        Expr::Var(v) => env[v].clone(),
        Expr::Const(Constant::Pi) => Quantity::dimensionless(ExactScalar::pi()),
        Expr::Const(Constant::E) => Quantity::dimensionless(ExactScalar::e()),
        Expr::Neg(x) => eval(x, env, reg)?.neg(),
        Expr::Bin(op, l, r) => {
            let a = eval(l, env, reg)?;
            let b = eval(r, env, reg)?;
            match op {
                BinOp::Add => a.checked_add(&b, reg)?,
                BinOp::Sub => a.checked_sub(&b, reg)?,
                BinOp::Mul => a.checked_mul(&b, reg)?,
                BinOp::Div => {
                    check_divisor(&b)?;
                    a.checked_div(&b, reg)?
                }
            }
        }
        Expr::Pow(b, k) => eval(b, env, reg)?.powi(*k)?,
        Expr::Sqrt(x) => eval(x, env, reg)?.sqrt()?,
    })
}

/// Zero divisors are errors; negative ones mean the described situation
/// cannot occur. Signs involving pi or e are not decided.
fn check_divisor(b: &Quantity) -> Result<(), EvalError> {
    if b.magnitude.is_zero() {
        return Err(EvalError::new(EvalErrorKind::DivisionByZero));
    }
    if b.magnitude.has_transcendental() {
        return Ok(());
    }
    match b.sign() {
        Ok(Sign::Negative) => Err(EvalError::new(EvalErrorKind::Infeasible {
            divisor: b.to_string(),
        })),
        Ok(_) => Ok(()),
        Err(e) => Err(crate::units::UnitError::Scalar(e).into()),
    }
}

/// Runs the program on concrete values. `overrides` replaces the values of
/// data or helpful declarations.
pub fn eval_by_value(p: &StepProgram, overrides: &BTreeMap<String, Quantity>) -> Result<Trace, EvalError> {
    for name in overrides.keys() {
        if p.decl(name).is_none() {
            return Err(EvalError::new(EvalErrorKind::NotInput(name.clone())));
        }
    }
    let reg = p.registry();
    let mut env = BTreeMap::new();
    let mut inputs = Vec::new();
    for d in p.decls() {
        let value = match (overrides.get(&d.name), &d.value) {
            (Some(q), _) => q.clone(),
            (None, DeclValue::Quantity(q)) => q.clone(),
            (None, DeclValue::Symbol { .. }) => {
                return Err(EvalError::new(EvalErrorKind::NotConcrete(d.name.clone()))
                    .at(&d.name, d.question.as_ref()))
            }
        };
        reg.dimension_of(&value.unit)
            .map_err(|e| EvalError::from(e).at(&d.name, d.question.as_ref()))?;
        env.insert(d.name.clone(), value.clone());
        inputs.push((d.name.clone(), value));
    }
    let mut entries = Vec::new();
    for s in p.steps() {
        let value = eval(&s.expr, &env, reg).map_err(|e| e.at(&s.name, s.question.as_ref()))?;
        let eq = equation(&s.expr, &|v| env.get(v).map(value_text));
        env.insert(s.name.clone(), value.clone());
        entries.push(TraceEntry {
            name: s.name.clone(),
            question: s.question.clone(),
            value,
            equation: eq,
        });
    }
    Ok(Trace {
        inputs,
        entries,
        target: p.target().to_string(),
        answer: env[p.target()].clone(),
    })
}
