use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::pow;

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(BigRational),
    Op(&'static str),
    /// `? text` up to the end of the line.
    Question(String),
    /// `% text` up to the end of the line.
    Comment(String),
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const OPS: [&str; 11] = [":=", "==", "+", "-", "*", "/", "^", "(", ")", "=", ";"];

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let at = |i: usize| (li + 1, i + 1);
        while i < chars.len() {
            let c = chars[i];
            let (l, col) = at(i);
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l, col });
            if c.is_whitespace() {
                i += 1;
            } else if c == '%' || c == '?' {
                let text: String = chars[i + 1..].iter().collect();
                let text = text.trim().to_string();
                push(&mut out, if c == '%' { Tok::Comment(text) } else { Tok::Question(text) });
                i = chars.len();
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let int: String = chars[start..i].iter().collect();
                let mut value = BigRational::from_integer(int.parse::<BigInt>().unwrap());
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    let fs = i + 1;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let frac: String = chars[fs..i].iter().collect();
                    let scale = pow(BigInt::from(10), frac.len());
                    value += BigRational::new(frac.parse::<BigInt>().unwrap(), scale);
                }
                push(&mut out, Tok::Number(value));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            } else {
                let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
                match OPS.iter().find(|op| rest.starts_with(**op)) {
                    Some(op) => {
                        push(&mut out, Tok::Op(op));
                        i += op.chars().count();
                    }
                    None => {
                        return Err(ParseError::SyntaxError {
                            line: l,
                            col,
                            message: format!("unexpected character `{c}`"),
                        })
                    }
                }
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line: li + 1,
            col: chars.len() + 1,
        });
    }
    let last = src.lines().count().max(1);
    out.push(Token {
        tok: Tok::Eof,
        line: last,
        col: 1,
    });
    Ok(out)
}
