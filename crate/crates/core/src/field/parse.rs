//! Exact scalar parsing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ratfunc::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: String,
}

impl ParseScalarError {
    fn new(input: &str, reason: impl Into<String>) -> Self {
        ParseScalarError {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `a` or `a/b` with decimal integers; `b` may not carry a sign.
pub(crate) fn parse_rational(input: &str) -> Result<BigRational, ParseScalarError> {
    let s = input.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim();
            let d = d.trim();
            if d.starts_with(['-', '+']) {
                return Err(ParseScalarError::new(input, "signed denominator"));
            }
            (n, Some(d))
        }
        None => (s, None),
    };
    let num = parse_int(n).ok_or_else(|| ParseScalarError::new(input, "malformed integer"))?;
    let den = match d {
        Some(d) => parse_int(d).ok_or_else(|| ParseScalarError::new(input, "malformed denominator"))?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return Err(ParseScalarError::new(input, "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Decimal residue in `[0, p)`.
pub(crate) fn parse_residue(input: &str, p: u64) -> Result<u64, ParseScalarError> {
    let s = input.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseScalarError::new(input, "expected a decimal residue"));
    }
    let v: u64 = s
        .parse()
        .map_err(|_| ParseScalarError::new(input, "residue out of range"))?;
    if v >= p {
        return Err(ParseScalarError::new(input, format!("residue not below {p}")));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<Tok>, ParseScalarError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => {}
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            't' => out.push(Tok::T),
            '0'..='9' => {
                let start = i;
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Int(input[start..=i].parse().unwrap()));
            }
            _ => return Err(ParseScalarError::new(input, format!("unexpected character {c:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> ParseScalarError {
        ParseScalarError::new(self.input, reason)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFunc, ParseScalarError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseScalarError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(&d).ok_or_else(|| self.err("division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ParseScalarError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, ParseScalarError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e = match self.next() {
            Some(Tok::Int(e)) => e.to_u32().ok_or_else(|| self.err("exponent too large"))?,
            _ => return Err(self.err("expected a non-negative integer exponent")),
        };
        let num = base.numer().pow(e);
        let den = base.denom().pow(e);
        Ok(RatFunc::new(num, den).expect("power of a nonzero denominator"))
    }

    fn atom(&mut self) -> Result<RatFunc, ParseScalarError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(RatFunc::constant(BigRational::from_integer(n))),
            Some(Tok::T) => Ok(RatFunc::t()),
            Some(Tok::LParen) => {
                let v = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(v),
                    _ => Err(self.err("unbalanced parenthesis")),
                }
            }
            _ => Err(self.err("expected an integer, 't' or '('")),
        }
    }
}

/// Rational-function expression in `t` using `+ - * / ^`, integers and parentheses.
pub(crate) fn parse_ratfunc(input: &str) -> Result<RatFunc, ParseScalarError> {
    let toks = lex(input)?;
    if toks.is_empty() {
        return Err(ParseScalarError::new(input, "empty expression"));
    }
    let mut p = Parser { input, toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(
            parse_rational("-2/4").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        for bad in ["", "1/0", "1/-2", "1.5", "a", "1/", "--1", "1 2"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn residues() {
        assert_eq!(parse_residue("4", 5).unwrap(), 4);
        assert!(parse_residue("5", 5).is_err());
        assert!(parse_residue("-1", 5).is_err());
        assert!(parse_residue("", 5).is_err());
    }

    #[test]
    fn ratfunc_expressions() {
        let r = parse_ratfunc("(2*t+1)/(t^2)").unwrap();
        assert_eq!(r.to_string(), "(2*t+1)/t^2");
        assert_eq!(parse_ratfunc("1/t*t").unwrap(), RatFunc::one());
        assert_eq!(parse_ratfunc("-t^2 + 3").unwrap().to_string(), "-t^2+3");
        for bad in ["", "t/(t-t)", "2t", "(t", "t^-1", "t^", "x", "1/2/"] {
            assert!(parse_ratfunc(bad).is_err(), "{bad}");
        }
    }
}
