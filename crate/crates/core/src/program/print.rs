//! Source rendering. Everything printed here parses back to the same
//! program.

use super::{BinOp, Constant, DeclValue, Expr, StepProgram, Stmt};
use crate::units::Quantity;

/// Text for a variable's value, and whether it needs grouping when it is
/// not at the start of a term (`72 cherry`, `1/2`, `-3`).
pub(crate) type Values<'a> = dyn Fn(&str) -> Option<(String, bool)> + 'a;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

/// Literals with a unit, a fraction or a sign read differently once they
/// follow `*` or `/`, so they are grouped there.
pub(crate) fn quantity_is_compound(q: &Quantity) -> bool {
    !q.unit.is_dimensionless()
        || q
            .magnitude
            .as_rational()
            .is_none_or(|r| !r.is_integer() || r < num_rational::BigRational::default())
}

pub(crate) fn quantity_text(q: &Quantity, full: bool) -> String {
    if full {
        format!("{q:#}")
    } else {
        q.to_string()
    }
}

fn is_compound(e: &Expr, values: &Values) -> bool {
    match e {
        Expr::Lit(q) => quantity_is_compound(q),
        Expr::Var(v) => values(v).is_some_and(|(_, c)| c),
        _ => false,
    }
}

fn child(e: &Expr, parent: u8, start: bool, right: bool, values: &Values, full: bool) -> String {
    let p = prec(e);
    let group = p < parent || (right && p == parent) || (is_compound(e, values) && !start);
    if group {
        format!("({})", show(e, true, values, full))
    } else {
        show(e, start, values, full)
    }
}

fn show(e: &Expr, start: bool, values: &Values, full: bool) -> String {
    match e {
        Expr::Lit(q) => quantity_text(q, full),
        Expr::Var(v) => values(v).map_or_else(|| v.clone(), |(s, _)| s),
        Expr::Const(Constant::Pi) => "pi".into(),
        Expr::Const(Constant::E) => "e".into(),
        Expr::Neg(x) => format!("-{}", child(x, 3, start, false, values, full)),
        Expr::Bin(op, l, r) => {
            let p = prec(e);
            let ls = child(l, p, start, false, values, full);
            let new_term = matches!(op, BinOp::Add | BinOp::Sub);
            let rs = child(r, p, new_term, true, values, full);
            let sym = match op {
                BinOp::Add => " + ",
                BinOp::Sub => " - ",
                BinOp::Mul => "*",
                BinOp::Div => "/",
            };
            format!("{ls}{sym}{rs}")
        }
        Expr::Pow(b, k) => format!("{}^{k}", child(b, 5, false, false, values, full)),
        Expr::Sqrt(x) => format!("sqrt({})", show(x, true, values, full)),
    }
}

/// Source form of an expression, with variables optionally replaced.
pub(crate) fn expr(e: &Expr, values: &Values) -> String {
    show(e, true, values, true)
}

/// Like [`expr`] with compact number rendering, for traces.
pub(crate) fn equation(e: &Expr, values: &Values) -> String {
    show(e, true, values, false)
}

pub(crate) fn decl_value(v: &DeclValue) -> String {
    match v {
        DeclValue::Quantity(q) => quantity_text(q, true),
        symbol => symbol.to_string(),
    }
}

pub(crate) fn stmt(s: &Stmt) -> String {
    match s {
        Stmt::Blank | Stmt::Comment => String::new(),
        Stmt::Unit(name) => format!("unit {name}"),
        Stmt::Rate(a, b) => format!("rate {} == {}", quantity_text(a, true), quantity_text(b, true)),
        Stmt::Decl(d) => format!("{} {} = {}", d.role.keyword(), d.name, decl_value(&d.value)),
        Stmt::Step(s) => format!("{} := {}", s.name, expr(&s.expr, &|_| None)),
        Stmt::Return(name) => format!("return {name}"),
    }
}

pub(crate) fn program(p: &StepProgram) -> String {
    let mut out = String::new();
    for item in p.items() {
        let question = match &item.stmt {
            Stmt::Decl(d) => d.question.as_ref(),
            Stmt::Step(s) => s.question.as_ref(),
            _ => None,
        };
        if let Some(q) = question {
            out.push_str(&format!("? {q}\n"));
        }
        let body = stmt(&item.stmt);
        let line = match (&item.stmt, &item.comment) {
            (Stmt::Comment, Some(c)) => format!("% {c}"),
            (_, Some(c)) => format!("{body}  % {c}"),
            (_, None) => body,
        };
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
