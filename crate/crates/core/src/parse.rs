//! Reading operators from infix text such as `D^2 + (0.5*t + 1)*D + 0.3*t`
//! or from JSON coefficient lists.
//!
//! Products are evaluated in the Ore algebra, so `D*t` reads as `t*D + 1`.
//! Division is only allowed by nonzero numeric constants.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::ore::DiffPoly;
use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(String),
    T,
    D,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let token = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' | '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                out.push((start, Token::Number(chars[start..i].iter().collect())));
                continue;
            }
            't' => Token::T,
            'D' | '∂' => Token::D,
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::Open,
            ')' => Token::Close,
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        };
        i += 1;
        out.push((start, token));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr<S: Scalar>(&mut self) -> Result<DiffPoly<S>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<DiffPoly<S>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    acc = acc.ore_mul(&self.unary()?);
                }
                Some(Token::Slash) => {
                    self.next();
                    let at = self.offset();
                    let divisor = self.unary()?;
                    acc = acc.scale(&constant_inverse(&divisor, at)?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<S: Scalar>(&mut self) -> Result<DiffPoly<S>> {
        match self.peek() {
            Some(Token::Minus) => {
                self.next();
                Ok(-self.unary::<S>()?)
            }
            Some(Token::Plus) => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<S: Scalar>(&mut self) -> Result<DiffPoly<S>> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.next();
        let at = self.offset();
        let exponent = match self.next() {
            Some(Token::Number(text)) => text
                .parse::<u32>()
                .map_err(|_| err(at, "exponent must be a nonnegative integer"))?,
            _ => return Err(err(at, "expected an integer exponent")),
        };
        Ok((0..exponent).fold(DiffPoly::one(), |acc, _| acc.ore_mul(&base)))
    }

    fn atom<S: Scalar>(&mut self) -> Result<DiffPoly<S>> {
        let at = self.offset();
        match self.next() {
            Some(Token::Number(text)) => {
                let value = S::from_decimal(&text).ok_or_else(|| err(at, format!("bad number `{text}`")))?;
                Ok(DiffPoly::from_poly(Poly::constant(value)))
            }
            Some(Token::T) => Ok(DiffPoly::from_poly(Poly::t())),
            Some(Token::D) => Ok(DiffPoly::d()),
            Some(Token::Open) => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(err(close, "expected `)`")),
                }
            }
            Some(other) => Err(err(at, format!("unexpected `{other:?}`"))),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

fn constant_inverse<S: Scalar>(divisor: &DiffPoly<S>, at: usize) -> Result<S> {
    if divisor.deg_d().unwrap_or(0) > 0 || divisor.deg_t().unwrap_or(0) > 0 {
        return Err(err(at, "division is only allowed by numeric constants"));
    }
    let value = divisor.coeff(0).coeff(0);
    if value.is_zero() {
        return Err(err(at, "division by zero"));
    }
    Ok(S::one() / value)
}

fn parse_infix<S: Scalar>(text: &str) -> Result<DiffPoly<S>> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let value = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(err(parser.offset(), "trailing input"));
    }
    Ok(value)
}

fn json_scalar<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::Number(n) => S::from_decimal(&n.to_string()).ok_or_else(|| err(0, format!("bad coefficient {n}"))),
        other => Err(err(0, format!("coefficient must be a number, got {other}"))),
    }
}

fn json_rows<S: Scalar>(v: &Value) -> Result<DiffPoly<S>> {
    let rows = v
        .as_array()
        .ok_or_else(|| err(0, "`coeffs` must be an array of arrays"))?;
    let mut coeffs = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| err(0, "each coefficient must be an array"))?;
        coeffs.push(Poly::new(row.iter().map(json_scalar).collect::<Result<Vec<S>>>()?));
    }
    Ok(DiffPoly::new(coeffs))
}

fn parse_json<S: Scalar>(text: &str) -> Result<DiffPoly<S>> {
    let value: Value = serde_json::from_str(text).map_err(|e| err(0, e.to_string()))?;
    match &value {
        Value::Object(map) => json_rows(map.get("coeffs").ok_or_else(|| err(0, "missing `coeffs`"))?),
        Value::Array(_) => json_rows(&value),
        _ => Err(err(0, "expected an object or an array")),
    }
}

/// Parses an operator from infix text or JSON (`{"coeffs": [[..], ..]}` or a
/// bare array of arrays, `coeffs[i][j]` multiplying `t^j D^i`).
pub fn parse_diffpoly<S: Scalar>(text: &str) -> Result<DiffPoly<S>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        parse_json(trimmed)
    } else {
        parse_infix(text)
    }
}

/// Parses a polynomial in `t`; `D` is rejected.
pub fn parse_poly<S: Scalar>(text: &str) -> Result<Poly<S>> {
    let op = parse_infix::<S>(text)?;
    if op.deg_d().unwrap_or(0) > 0 {
        return Err(err(0, "expected a polynomial in t"));
    }
    Ok(op.coeff(0))
}
