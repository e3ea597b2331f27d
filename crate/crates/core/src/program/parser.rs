use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};

use super::lexer::{lex, Tok, Token};
use super::{
    BinOp, Constant, Decl, DeclValue, Expr, Item, ParseError, Role, Step, StepProgram, Stmt,
    KEYWORDS,
};
use crate::scalar::ExactScalar;
use crate::units::{Quantity, UnitError, UnitExpr, UnitRegistry};

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    reg: UnitRegistry,
    defined: BTreeSet<String>,
}

type Res<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, reg: UnitRegistry) -> Res<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            reg,
            defined: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn eat(&mut self, op: &str) -> bool {
        let hit = self.is_op(op);
        if hit {
            self.advance();
        }
        hit
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Res<T> {
        let (line, col) = self.here();
        Err(ParseError::SyntaxError {
            line,
            col,
            message: message.into(),
        })
    }

    fn expect(&mut self, op: &str) -> Res<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.syntax(format!("expected `{op}`, found {}", describe(self.peek())))
        }
    }

    fn unit_err(&self, at: (usize, usize), source: UnitError) -> ParseError {
        match source {
            UnitError::UnknownUnit(name) => ParseError::UnknownUnit {
                name,
                line: at.0,
                col: at.1,
            },
            source => ParseError::Unit {
                line: at.0,
                col: at.1,
                source,
            },
        }
    }

    /// A fresh name for a declaration or step.
    fn new_name(&mut self) -> Res<(String, (usize, usize))> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                self.syntax(format!("`{name}` is a keyword"))
            }
            Tok::Ident(name) => {
                if self.defined.contains(&name) {
                    return Err(ParseError::Redefinition {
                        name,
                        line: at.0,
                        col: at.1,
                    });
                }
                self.advance();
                Ok((name, at))
            }
            other => self.syntax(format!("expected a name, found {}", describe(&other))),
        }
    }

    fn integer(&mut self) -> Res<i32> {
        let neg = self.eat("-");
        match self.peek().clone() {
            Tok::Number(q) if q.is_integer() => {
                let Some(k) = q.to_integer().to_i32() else {
                    return self.syntax("exponent too large");
                };
                self.advance();
                Ok(if neg { -k } else { k })
            }
            other => self.syntax(format!("expected an integer exponent, found {}", describe(&other))),
        }
    }

    /// Whether the identifier at the cursor can be read as a unit atom. In
    /// expressions a variable of the same name wins.
    fn unit_ahead(&self, k: usize, in_expr: bool) -> bool {
        match self.peek_at(k) {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                if in_expr {
                    self.reg.contains(name) && !self.defined.contains(name)
                } else {
                    true
                }
            }
            _ => false,
        }
    }

    fn unit_atom(&mut self, unit: &mut UnitExpr, sign: i32) -> Res<()> {
        let at = self.here();
        let Tok::Ident(name) = self.advance() else {
            unreachable!("checked by unit_ahead")
        };
        if !self.reg.contains(&name) {
            return Err(ParseError::UnknownUnit {
                name,
                line: at.0,
                col: at.1,
            });
        }
        let exp = if self.eat("^") { self.integer()? } else { 1 };
        unit.add_exponent(&name, sign * exp);
        Ok(())
    }

    /// `atom(^int)?((*|/)atom(^int)?)*` following a numeral.
    fn unit_expr(&mut self, in_expr: bool) -> Res<UnitExpr> {
        let mut unit = UnitExpr::dimensionless();
        if in_expr {
            if let Tok::Ident(name) = self.peek() {
                let name = name.clone();
                if !self.reg.contains(&name)
                    && !self.defined.contains(&name)
                    && !KEYWORDS.contains(&name.as_str())
                    && name != "pi"
                    && name != "e"
                {
                    let (line, col) = self.here();
                    return Err(ParseError::UnknownUnit { name, line, col });
                }
            }
        }
        if !self.unit_ahead(0, in_expr) {
            return Ok(unit);
        }
        self.unit_atom(&mut unit, 1)?;
        loop {
            let sign = if self.is_op("*") {
                1
            } else if self.is_op("/") {
                -1
            } else {
                return Ok(unit);
            };
            if !self.unit_ahead(1, in_expr) {
                return Ok(unit);
            }
            self.advance();
            self.unit_atom(&mut unit, sign)?;
        }
    }

    /// Numeral, optional `/denominator`, optional unit.
    fn literal(&mut self, allow_fraction: bool, in_expr: bool) -> Res<Quantity> {
        let neg = !in_expr && self.eat("-");
        let Tok::Number(mut value) = self.peek().clone() else {
            return self.syntax(format!("expected a number, found {}", describe(self.peek())));
        };
        self.advance();
        if allow_fraction && self.is_op("/") {
            if let Tok::Number(den) = self.peek_at(1).clone() {
                self.advance();
                if den.is_zero() {
                    return self.syntax("zero denominator in a fraction");
                }
                self.advance();
                value /= den;
            }
        }
        if neg {
            value = -value;
        }
        let unit = self.unit_expr(in_expr)?;
        Ok(Quantity::new(ExactScalar::from_rational(value), unit))
    }

    fn decl_value(&mut self) -> Res<DeclValue> {
        match self.peek().clone() {
            Tok::Ident(letter) if !KEYWORDS.contains(&letter.as_str()) => {
                self.advance();
                let unit = self.unit_expr(false)?;
                Ok(DeclValue::Symbol { letter, unit })
            }
            Tok::Number(_) | Tok::Op("-") => Ok(DeclValue::Quantity(self.literal(true, false)?)),
            other => self.syntax(format!(
                "expected a quantity or a letter, found {}",
                describe(&other)
            )),
        }
    }

    fn expr(&mut self) -> Res<Expr> {
        let mut acc = self.term()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(acc);
            };
            acc = Expr::bin(op, acc, self.term()?);
        }
    }

    fn term(&mut self) -> Res<Expr> {
        let mut acc = self.unary(true)?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(acc);
            };
            acc = Expr::bin(op, acc, self.unary(false)?);
        }
    }

    fn unary(&mut self, first: bool) -> Res<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary(first)?)));
        }
        let base = self.primary(first)?;
        if self.eat("^") {
            let k = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn primary(&mut self, first: bool) -> Res<Expr> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Number(_) => Ok(Expr::Lit(self.literal(first, true)?)),
            Tok::Op("(") => {
                self.advance();
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.defined.contains(&name) {
                    self.advance();
                    return Ok(Expr::Var(name));
                }
                match name.as_str() {
                    "sqrt" => {
                        self.advance();
                        self.expect("(")?;
                        let inner = self.expr()?;
                        self.expect(")")?;
                        Ok(Expr::Sqrt(Box::new(inner)))
                    }
                    "pi" => {
                        self.advance();
                        Ok(Expr::Const(Constant::Pi))
                    }
                    "e" => {
                        self.advance();
                        Ok(Expr::Const(Constant::E))
                    }
                    kw if KEYWORDS.contains(&kw) => self.syntax(format!("unexpected keyword `{kw}`")),
                    _ => Err(ParseError::UseBeforeDefinition {
                        name,
                        line: at.0,
                        col: at.1,
                    }),
                }
            }
            other => self.syntax(format!("expected an expression, found {}", describe(&other))),
        }
    }

    fn end_of_statement(&mut self) -> Res<Option<String>> {
        let comment = match self.peek().clone() {
            Tok::Comment(c) => {
                self.advance();
                Some(c)
            }
            _ => None,
        };
        match self.peek() {
            Tok::Newline | Tok::Eof | Tok::Op(";") => Ok(comment),
            other => self.syntax(format!("expected end of statement, found {}", describe(other))),
        }
    }

    fn statement(&mut self, question: &mut Option<String>) -> Res<(Stmt, Option<String>)> {
        let at = self.here();
        let Tok::Ident(word) = self.peek().clone() else {
            return self.syntax(format!("expected a statement, found {}", describe(self.peek())));
        };
        let stmt = match word.as_str() {
            "unit" | "rate" | "return" if question.is_some() => {
                return self.syntax("a `?` question must be followed by a declaration or a step");
            }
            "unit" => {
                self.advance();
                let name_at = self.here();
                let Tok::Ident(name) = self.advance() else {
                    return Err(ParseError::SyntaxError {
                        line: name_at.0,
                        col: name_at.1,
                        message: "expected a unit name".into(),
                    });
                };
                self.reg = self
                    .reg
                    .declare_unit(&name)
                    .map_err(|e| self.unit_err(name_at, e))?;
                Stmt::Unit(name)
            }
            "rate" => {
                self.advance();
                let lhs = self.literal(true, false)?;
                self.expect("==")?;
                let rhs = self.literal(true, false)?;
                self.reg = self
                    .reg
                    .declare_rate(&lhs, &rhs)
                    .map_err(|e| self.unit_err(at, e))?;
                Stmt::Rate(lhs, rhs)
            }
            "data" | "helpful" => {
                self.advance();
                let role = if word == "data" { Role::Data } else { Role::Helpful };
                let (name, _) = self.new_name()?;
                self.expect("=")?;
                let value = self.decl_value()?;
                self.defined.insert(name.clone());
                Stmt::Decl(Decl {
                    name,
                    role,
                    value,
                    question: question.take(),
                })
            }
            "return" => {
                self.advance();
                let name_at = self.here();
                match self.advance() {
                    Tok::Ident(name) if self.defined.contains(&name) => Stmt::Return(name),
                    Tok::Ident(name) => {
                        return Err(ParseError::UseBeforeDefinition {
                            name,
                            line: name_at.0,
                            col: name_at.1,
                        })
                    }
                    other => {
                        return Err(ParseError::SyntaxError {
                            line: name_at.0,
                            col: name_at.1,
                            message: format!("expected a name, found {}", describe(&other)),
                        })
                    }
                }
            }
            _ => {
                if !matches!(self.peek_at(1), Tok::Op(":=")) {
                    return self.syntax(format!("expected a statement, found `{word}`"));
                }
                let (name, _) = self.new_name()?;
                self.expect(":=")?;
                let expr = self.expr()?;
                self.defined.insert(name.clone());
                Stmt::Step(Step {
                    name,
                    question: question.take(),
                    expr,
                    line: at.0,
                })
            }
        };
        Ok((stmt, self.end_of_statement()?))
    }

    fn program(mut self) -> Res<StepProgram> {
        let mut items: Vec<Item> = Vec::new();
        let mut question: Option<String> = None;
        let mut target: Option<String> = None;
        let mut line_start = true;
        let mut blank_run = false;
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Newline => {
                    self.advance();
                    if line_start && !items.is_empty() && !blank_run && question.is_none() {
                        items.push(Item {
                            stmt: Stmt::Blank,
                            comment: None,
                        });
                        blank_run = true;
                    }
                    line_start = true;
                    continue;
                }
                Tok::Op(";") => {
                    self.advance();
                }
                Tok::Comment(c) => {
                    self.advance();
                    items.push(Item {
                        stmt: Stmt::Comment,
                        comment: Some(c),
                    });
                }
                Tok::Question(q) => {
                    if question.is_some() {
                        return self.syntax("two `?` questions in a row");
                    }
                    self.advance();
                    question = Some(q);
                }
                _ => {
                    let at = self.here();
                    let (stmt, comment) = self.statement(&mut question)?;
                    if let Stmt::Return(name) = &stmt {
                        if target.is_some() {
                            return Err(ParseError::SyntaxError {
                                line: at.0,
                                col: at.1,
                                message: "a program has a single `return`".into(),
                            });
                        }
                        target = Some(name.clone());
                    }
                    items.push(Item { stmt, comment });
                }
            }
            line_start = false;
            blank_run = false;
        }
        if question.is_some() {
            return self.syntax("a `?` question must be followed by a declaration or a step");
        }
        while matches!(items.last(), Some(Item { stmt: Stmt::Blank, .. })) {
            items.pop();
        }
        let target = target.ok_or(ParseError::MissingReturn)?;
        Ok(StepProgram {
            items,
            registry: self.reg,
            target,
        })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(q) => format!("`{q}`"),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Question(_) => "a question".into(),
        Tok::Comment(_) => "a comment".into(),
        Tok::Newline => "end of line".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a step program.
pub fn parse(source: &str) -> Result<StepProgram, ParseError> {
    Parser::new(source, UnitRegistry::new())?.program()
}

/// Parses the right-hand side of a declaration (`72 cherry`, `1/2 min`,
/// `A min`, `A`) against a program's units.
pub fn parse_decl_value(text: &str, reg: &UnitRegistry) -> Result<DeclValue, ParseError> {
    let mut p = Parser::new(text, reg.clone())?;
    let value = p.decl_value()?;
    while matches!(p.peek(), Tok::Newline) {
        p.advance();
    }
    if !matches!(p.peek(), Tok::Eof) {
        return p.syntax(format!("unexpected {}", describe(p.peek())));
    }
    Ok(value)
}
