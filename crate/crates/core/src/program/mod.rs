//! The step-program language.
//!
//! A program declares units and exchange rates, the given data, any helpful
//! numbers the solver introduced, and a straight line of named steps ending
//! in `return`. Every name is assigned exactly once, before it is used.
//!
//! ```text
//! unit min; unit cherry
//! data A = 24 min
//! data B = 8 min
//! helpful C = 72 cherry
//! ? What are Alice's and Bob's picking speeds?
//! U := C/A
//! V := C/B
//! W := U + V
//! T := C/W
//! return T
//! ```
//!
//! Programs run two ways: [`eval_by_value`] on concrete quantities, giving a
//! unit-checked [`Trace`], and [`eval_by_name`] with some inputs replaced by
//! symbols, giving a simplified closed form.

mod check;
mod lexer;
mod name;
mod parser;
mod print;
#[cfg(test)]
mod tests;
mod value;

use std::fmt;

use thiserror::Error;

use crate::scalar::ScalarError;
use crate::symbolic::SymbolicError;
use crate::units::{Quantity, UnitError, UnitExpr, UnitRegistry};

pub use check::{
    agreement_check, check_helpful_independence, AgreementReport, Independence, IndependenceEntry,
};
pub use name::{eval_by_name, Atom, AtomKind, Condition, SymbolicResult, SymbolicStep};
pub use parser::{parse, parse_decl_value};
pub use value::{eval_by_value, Trace, TraceEntry};

pub(crate) const KEYWORDS: [&str; 6] = ["unit", "rate", "data", "helpful", "return", "sqrt"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Quantity),
    Var(String),
    Const(Constant),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    /// Variables referenced, in first-use order.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Expr::Lit(_) | Expr::Const(_) => {}
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Sqrt(e) => e.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::expr(self, &|_| None))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Data,
    Helpful,
}

impl Role {
    pub fn keyword(self) -> &'static str {
        match self {
            Role::Data => "data",
            Role::Helpful => "helpful",
        }
    }
}

/// Right-hand side of a `data` or `helpful` declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DeclValue {
    Quantity(Quantity),
    /// A letter standing for the value, with the unit it is measured in.
    Symbol { letter: String, unit: UnitExpr },
}

impl DeclValue {
    pub fn unit(&self) -> &UnitExpr {
        match self {
            DeclValue::Quantity(q) => &q.unit,
            DeclValue::Symbol { unit, .. } => unit,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, DeclValue::Symbol { .. })
    }
}

impl fmt::Display for DeclValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclValue::Quantity(q) => write!(f, "{q}"),
            DeclValue::Symbol { letter, unit } if unit.is_dimensionless() => f.write_str(letter),
            DeclValue::Symbol { letter, unit } => write!(f, "{letter} {unit}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decl {
    pub name: String,
    pub role: Role,
    pub value: DeclValue,
    pub question: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub name: String,
    pub question: Option<String>,
    pub expr: Expr,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Blank,
    /// A line holding only a comment.
    Comment,
    Unit(String),
    Rate(Quantity, Quantity),
    Decl(Decl),
    Step(Step),
    Return(String),
}

/// A statement with the comment that followed it on the same line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Item {
    pub stmt: Stmt,
    pub comment: Option<String>,
}

/// A parsed program. Immutable; the unit registry is the one built by its
/// `unit` and `rate` statements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepProgram {
    items: Vec<Item>,
    registry: UnitRegistry,
    target: String,
}

impl StepProgram {
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn registry(&self) -> &UnitRegistry {
        &self.registry
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    /// `unit` and `rate` statements in source form.
    pub fn unit_decls(&self) -> Vec<String> {
        self.items
            .iter()
            .filter(|it| matches!(it.stmt, Stmt::Unit(_) | Stmt::Rate(..)))
            .map(|it| print::stmt(&it.stmt))
            .collect()
    }

    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.items.iter().filter_map(|it| match &it.stmt {
            Stmt::Decl(d) => Some(d),
            _ => None,
        })
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls().find(|d| d.name == name)
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.items.iter().filter_map(|it| match &it.stmt {
            Stmt::Step(s) => Some(s),
            _ => None,
        })
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps().find(|s| s.name == name)
    }

    /// Canonical source text. Comments, questions and single blank lines
    /// are kept; `fmt` of the output is the output.
    pub fn fmt(&self) -> String {
        print::program(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    SyntaxError { line: usize, col: usize, message: String },
    #[error("{line}:{col}: `{name}` is used before it is defined")]
    UseBeforeDefinition { name: String, line: usize, col: usize },
    #[error("{line}:{col}: `{name}` is already defined")]
    Redefinition { name: String, line: usize, col: usize },
    #[error("{line}:{col}: unknown unit `{name}`")]
    UnknownUnit { name: String, line: usize, col: usize },
    #[error("{line}:{col}: {source}")]
    Unit { line: usize, col: usize, source: UnitError },
    #[error("the program has no `return` statement")]
    MissingReturn,
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::SyntaxError { .. } => "syntax_error",
            ParseError::UseBeforeDefinition { .. } => "use_before_definition",
            ParseError::Redefinition { .. } => "redefinition",
            ParseError::UnknownUnit { .. } => "unknown_unit",
            ParseError::Unit { .. } => "unit_error",
            ParseError::MissingReturn => "missing_return",
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::SyntaxError { line, .. }
            | ParseError::UseBeforeDefinition { line, .. }
            | ParseError::Redefinition { line, .. }
            | ParseError::UnknownUnit { line, .. }
            | ParseError::Unit { line, .. } => Some(*line),
            ParseError::MissingReturn => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalErrorKind {
    #[error(transparent)]
    Units(UnitError),
    #[error("division by zero")]
    DivisionByZero,
    /// A divisor came out negative: the situation the program describes
    /// cannot happen with these numbers.
    #[error("infeasible: the divisor {divisor} is negative")]
    Infeasible { divisor: String },
    #[error("`{0}` has no concrete value")]
    NotConcrete(String),
    #[error("`{0}` is not a data or helpful declaration")]
    NotInput(String),
    #[error("square roots over symbols are not supported: {0}")]
    SymbolicRadicalUnsupported(String),
    #[error("letter `{0}` is used for two different declarations or clashes with a name")]
    SymbolClash(String),
    #[error(transparent)]
    Symbolic(SymbolicError),
}

/// An evaluation failure, located at the step (or declaration) that
/// caused it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct EvalError {
    pub step: Option<String>,
    pub question: Option<String>,
    pub kind: EvalErrorKind,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.step, &self.question) {
            (Some(s), Some(q)) => write!(f, "step {s} ({q}): {}", self.kind),
            (Some(s), None) => write!(f, "step {s}: {}", self.kind),
            _ => write!(f, "{}", self.kind),
        }
    }
}

impl EvalError {
    pub(crate) fn new(kind: EvalErrorKind) -> Self {
        EvalError {
            step: None,
            question: None,
            kind,
        }
    }

    pub(crate) fn at(mut self, name: &str, question: Option<&String>) -> Self {
        if self.step.is_none() {
            self.step = Some(name.to_string());
            self.question = question.cloned();
        }
        self
    }

    pub fn code(&self) -> &'static str {
        match &self.kind {
            EvalErrorKind::Units(UnitError::IncommensurableAddition { .. }) => "incommensurable_addition",
            EvalErrorKind::Units(UnitError::OddExponent(_)) => "odd_exponent",
            EvalErrorKind::Units(UnitError::Scalar(ScalarError::NegativeRadicand(_))) => "negative_radicand",
            EvalErrorKind::Units(_) => "unit_error",
            EvalErrorKind::DivisionByZero => "division_by_zero",
            EvalErrorKind::Infeasible { .. } => "infeasible",
            EvalErrorKind::NotConcrete(_) => "not_concrete",
            EvalErrorKind::NotInput(_) => "not_input",
            EvalErrorKind::SymbolicRadicalUnsupported(_) => "symbolic_radical_unsupported",
            EvalErrorKind::SymbolClash(_) => "symbol_clash",
            EvalErrorKind::Symbolic(SymbolicError::DimensionMismatch { .. }) => "dimension_mismatch",
            EvalErrorKind::Symbolic(_) => "symbolic_error",
        }
    }

    /// Division by zero, a negative divisor or a negative radicand.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self.kind,
            EvalErrorKind::DivisionByZero
                | EvalErrorKind::Infeasible { .. }
                | EvalErrorKind::Units(UnitError::Scalar(ScalarError::NegativeRadicand(_)))
        )
    }
}

impl From<UnitError> for EvalError {
    fn from(e: UnitError) -> Self {
        let kind = match e {
            UnitError::DivisionByZero | UnitError::Scalar(ScalarError::DivisionByZero) => {
                EvalErrorKind::DivisionByZero
            }
            other => EvalErrorKind::Units(other),
        };
        EvalError::new(kind)
    }
}

impl From<SymbolicError> for EvalError {
    fn from(e: SymbolicError) -> Self {
        let kind = match e {
            SymbolicError::DivisionByZero => EvalErrorKind::DivisionByZero,
            other => EvalErrorKind::Symbolic(other),
        };
        EvalError::new(kind)
    }
}

/// Parse or evaluation failure, for callers that do both.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl ProgramError {
    pub fn code(&self) -> &'static str {
        match self {
            ProgramError::Parse(e) => e.code(),
            ProgramError::Eval(e) => e.code(),
        }
    }
}
