use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::{ExactScalar, Monomial, ScalarError};

/// Integers at least this many bits wide are checked for a compact `b^k` form.
const COMPACT_BITS: u64 = 64;

/// Decimal rendering, except that large perfect powers print as `b^k`
/// unless `full` is set.
pub(crate) fn fmt_integer(n: &BigInt, full: bool) -> String {
    if full || n.bits() < COMPACT_BITS {
        return n.to_string();
    }
    match perfect_power(&n.abs()) {
        Some((base, exp)) => {
            let sign = if n.is_negative() { "-" } else { "" };
            format!("{sign}{base}^{exp}")
        }
        None => n.to_string(),
    }
}

pub(crate) fn fmt_rational(q: &BigRational, full: bool) -> String {
    if q.denom().is_one() {
        fmt_integer(q.numer(), full)
    } else {
        format!(
            "{}/{}",
            fmt_integer(q.numer(), full),
            fmt_integer(q.denom(), full)
        )
    }
}

/// Largest exponent `k >= 2` with `n = b^k`, found by peeling prime roots.
fn perfect_power(n: &BigInt) -> Option<(BigInt, u64)> {
    let mut base = n.clone();
    let mut exp = 1u64;
    'outer: loop {
        let bits = base.bits();
        if bits < 2 {
            break;
        }
        let mut p = 2u32;
        while (p as u64) < bits {
            if is_prime(p) {
                let r = base.nth_root(p);
                if r.pow(p) == base {
                    base = r;
                    exp *= p as u64;
                    continue 'outer;
                }
            }
            p += 1;
        }
        break;
    }
    (exp > 1).then_some((base, exp))
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn fmt_monomial(m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    if !m.radicand.is_one() {
        parts.push(format!("sqrt({})", m.radicand));
    }
    for (name, exp) in [("pi", m.pi_exp), ("e", m.e_exp)] {
        match exp {
            0 => {}
            1 => parts.push(name.to_string()),
            k => parts.push(format!("{name}^{k}")),
        }
    }
    parts
}

pub(super) fn render(x: &ExactScalar, full: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let unit = Monomial::unit();
    let ordered = x
        .terms
        .get_key_value(&unit)
        .into_iter()
        .chain(x.terms.iter().filter(|(m, _)| !m.is_unit()));
    let mut out = String::new();
    for (i, (m, c)) in ordered.enumerate() {
        let negative = c.is_negative();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mag = c.abs();
        let factors = fmt_monomial(m);
        if factors.is_empty() {
            out.push_str(&fmt_rational(&mag, full));
        } else {
            if !mag.is_one() {
                out.push_str(&fmt_rational(&mag, full));
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            toks.push(Tok::Int(digits.parse().unwrap()));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            toks.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self, op: char) -> bool {
        self.toks.get(self.pos) == Some(&Tok::Op(op))
    }

    fn eat_op(&mut self, op: char) -> bool {
        let hit = self.peek_op(op);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expr(&mut self) -> Result<ExactScalar, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExactScalar, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat_op('/') {
                let rhs = self.unary()?;
                acc = acc.checked_div(&rhs).map_err(|e| e.to_string())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ExactScalar, String> {
        if self.eat_op('-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.eat_op('^') {
            let negative = self.eat_op('-');
            let k = match self.toks.get(self.pos) {
                Some(Tok::Int(n)) => n.to_i64().ok_or("exponent too large")?,
                _ => return Err("expected an integer exponent".into()),
            };
            self.pos += 1;
            let k = if negative { -k } else { k };
            return base.pow_int(k).map_err(|e| e.to_string());
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExactScalar, String> {
        let tok = self.toks.get(self.pos).cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(ExactScalar::from_integer(n)),
            Tok::Ident(name) => match name.as_str() {
                "pi" => Ok(ExactScalar::pi()),
                "e" => Ok(ExactScalar::e()),
                "sqrt" => {
                    if !self.eat_op('(') {
                        return Err("expected `(` after sqrt".into());
                    }
                    let inner = self.expr()?;
                    if !self.eat_op(')') {
                        return Err("expected `)`".into());
                    }
                    inner.sqrt().map_err(|e| e.to_string())
                }
                other => Err(format!("unknown name `{other}`")),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                if !self.eat_op(')') {
                    return Err("expected `)`".into());
                }
                Ok(inner)
            }
            Tok::Op(c) => Err(format!("unexpected `{c}`")),
        }
    }
}

pub(super) fn parse(s: &str) -> Result<ExactScalar, ScalarError> {
    let err = |reason: String| ScalarError::Parse {
        input: s.to_string(),
        reason,
    };
    let toks = lex(s).map_err(err)?;
    if toks.is_empty() {
        return Err(err("empty input".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let value = p.expr().map_err(err)?;
    if p.pos != p.toks.len() {
        return Err(err("trailing input".into()));
    }
    Ok(value)
}
