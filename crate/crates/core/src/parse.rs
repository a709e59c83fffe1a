//! Text grammar for polynomials, constants and vectors.
//!
//! Variables are `z1..zN`, with `z`, `w` accepted as aliases when `N ≤ 2`.
//! Coefficients are integers, fractions, decimals and `i`; `^` takes a
//! nonnegative integer exponent. Juxtaposition multiplies (`3i`, `2z`).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;
use crate::poly::MultiPoly;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str, nvars: usize) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: String| RetractError::Parse { pos, msg };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let text = &src[start..i];
                out.push((start, Tok::Num(parse_decimal(text).ok_or_else(|| {
                    err(start, format!("malformed number `{text}`"))
                })?)));
                continue;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "i" => Tok::I,
                    "z" if nvars == 1 || nvars == 2 => Tok::Var(0),
                    "w" if nvars == 2 => Tok::Var(1),
                    _ => match word.strip_prefix('z').and_then(|d| d.parse::<usize>().ok()) {
                        Some(k) if k >= 1 && k <= nvars => Tok::Var(k - 1),
                        Some(k) => {
                            return Err(err(
                                start,
                                format!("variable z{k} outside z1..z{nvars}"),
                            ))
                        }
                        None => return Err(err(start, format!("unknown identifier `{word}`"))),
                    },
                };
                out.push((start, tok));
                continue;
            }
            _ => return Err(err(start, format!("unexpected character `{c}`"))),
        }
        i += 1;
    }
    Ok(out)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(num, den))
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    nvars: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> RetractError {
        RetractError::Parse {
            pos: self.here(),
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -&self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.factor()?;
                    if !d.is_constant() {
                        return Err(RetractError::NotPolynomial(format!(
                            "division by the non-constant `{d}` at byte {at}"
                        )));
                    }
                    let c = d.constant_term();
                    let inv = c.inv().ok_or(RetractError::Parse {
                        pos: at,
                        msg: "division by zero".into(),
                    })?;
                    acc = acc.scale(&inv);
                }
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::I) | Some(Tok::LParen) => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(n)) if n.is_integer() => {
                    let k: u32 = n
                        .numer()
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    return Ok(base.pow(k));
                }
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.nvars, ExactComplex::real(n)))
            }
            Some(Tok::I) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.nvars, ExactComplex::i()))
            }
            Some(Tok::Var(k)) => {
                self.pos += 1;
                Ok(MultiPoly::var(self.nvars, k))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(t) => Err(self.err(format!("unexpected token {t:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses a polynomial in `nvars` variables.
pub fn parse_poly(src: &str, nvars: usize) -> Result<MultiPoly> {
    let toks = lex(src, nvars)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        nvars,
        end: src.len(),
    };
    let out = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Smallest variable count that makes `src` parse: the largest `zK` index,
/// or 2 when the aliases are used.
pub fn infer_nvars(src: &str) -> usize {
    let mut n = 1;
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_alphabetic() {
            let s = i;
            while i < b.len() && b[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word = &src[s..i];
            if word == "w" {
                n = n.max(2);
            } else if let Some(k) = word.strip_prefix('z').and_then(|d| d.parse::<usize>().ok()) {
                n = n.max(k);
            }
        } else {
            i += 1;
        }
    }
    n
}

pub fn parse_constant(src: &str) -> Result<ExactComplex> {
    let p = parse_poly(src, 0)?;
    Ok(p.constant_term())
}

/// Parses `(a, b, c)` or `[a, b, c]` or a bare comma list of constants.
pub fn parse_vector(src: &str) -> Result<Vec<ExactComplex>> {
    let t = src.trim();
    let inner = match (t.chars().next(), t.chars().last()) {
        (Some('['), Some(']')) => &t[1..t.len() - 1],
        (Some('('), Some(')')) if top_level_commas(&t[1..t.len() - 1]) => &t[1..t.len() - 1],
        _ => t,
    };
    split_top_level(inner).iter().map(|s| parse_constant(s)).collect()
}

fn top_level_commas(s: &str) -> bool {
    split_top_level(s).len() > 1
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grammar_examples() {
        let p = parse_poly("(1/2+3i)*z^2*w - w^3", 2).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[2, 1]), &ExactComplex::rational(1, 2) + &ExactComplex::gaussian(0, 3));
        assert_eq!(p.coeff(&[0, 3]), ExactComplex::from_int(-1));
        let q = parse_poly("z1*z2*z3 - 2/3*z3^2", 3).unwrap();
        assert_eq!(q.coeff(&[0, 0, 2]), ExactComplex::rational(-2, 3));
        assert_eq!(parse_poly("0.25*z", 1).unwrap().coeff(&[1]), ExactComplex::rational(1, 4));
        assert_eq!(parse_poly("(z+w)^2", 2).unwrap().to_string(), "z^2 + 2*z*w + w^2");
    }

    #[test]
    fn non_polynomial_is_rejected() {
        match parse_poly("1/z", 2) {
            Err(RetractError::NotPolynomial(_)) => {}
            other => panic!("expected not-polynomial, got {other:?}"),
        }
        assert!(matches!(parse_poly("z/0", 2), Err(RetractError::Parse { .. })));
        assert!(parse_poly("z +", 2).is_err());
        assert!(parse_poly("z4", 3).is_err());
        assert!(parse_poly("w", 3).is_err());
    }

    #[test]
    fn vectors_and_constants() {
        let v = parse_vector("(1, 1/2, 1/4, 0)").unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[2], ExactComplex::rational(1, 4));
        let v = parse_vector("[2, -1+i]").unwrap();
        assert_eq!(v[1], ExactComplex::gaussian(-1, 1));
        assert_eq!(parse_constant("(1/2+3i)").unwrap().to_string(), "(1/2+3i)");
        assert_eq!(infer_nvars("z1 + z4^2"), 4);
        assert_eq!(infer_nvars("z + w"), 2);
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in crate::poly::tests::arb_poly(2), q in crate::poly::tests::arb_poly(3)) {
            let s = p.to_string();
            let back = parse_poly(&s, 2).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), s);
            let s = q.to_string();
            prop_assert_eq!(parse_poly(&s, 3).unwrap(), q);
        }
    }
}
