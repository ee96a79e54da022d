//! Text syntax for polynomials: identifiers name generators, `*` multiplies, `^`
//! raises to an integer power, `p/q` literals are exact rationals, `hbar` and `i`
//! are reserved scalars. `hbar` alone may carry a negative exponent.

use std::sync::Arc;

use num::{BigInt, BigRational, Complex, One, Zero};

use super::scalar::{Coeff, Scalar};
use super::{Chart, SuperPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            column += 1;
        } else if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            i += 1;
            column += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Num(text.parse().expect("digits")),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
        } else {
            return Err(Error::Parse {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    chart: &'a Arc<Chart>,
    end: (usize, usize),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.column))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<SuperPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SuperPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let d = match self.bump() {
                        Some(Tok::Num(n)) if !n.is_zero() => n,
                        _ => {
                            self.pos -= 1;
                            return self.err("expected a nonzero integer after `/`");
                        }
                    };
                    acc = acc.scale(&Scalar::from_rational(BigRational::new(BigInt::one(), d)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SuperPoly> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(n)) => {
                let v: i64 = match i64::try_from(n) {
                    Ok(v) if v <= 64 => v,
                    _ => {
                        self.pos -= 1;
                        return self.err("exponent too large");
                    }
                };
                Ok(if neg { -v } else { v })
            }
            _ => {
                self.pos -= 1;
                self.err("expected an integer exponent")
            }
        }
    }

    fn power(&mut self) -> Result<SuperPoly> {
        let start = self.pos;
        let (base, odd_generator, is_hbar) = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let exp_pos = self.pos;
        let k = self.exponent()?;
        if k < 0 {
            if !is_hbar {
                self.pos = exp_pos;
                return self.err("negative exponents are only allowed on `hbar`");
            }
            return Ok(SuperPoly::constant(self.chart, Scalar::hbar_power(k as i32)));
        }
        if odd_generator && k > 1 {
            self.pos = start;
            return self.err("odd generators cannot be raised to powers above 1");
        }
        if is_hbar {
            return Ok(SuperPoly::constant(self.chart, Scalar::hbar_power(k as i32)));
        }
        Ok(base.pow(k as u32))
    }

    /// Returns the value, whether it is a single odd generator, and whether it is `hbar`.
    fn atom(&mut self) -> Result<(SuperPoly, bool, bool)> {
        match self.bump() {
            Some(Tok::Num(n)) => {
                let c: Coeff = Complex::new(BigRational::from_integer(n), BigRational::zero());
                Ok((SuperPoly::constant(self.chart, Scalar::from_coeff(c)), false, false))
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "hbar" => Ok((SuperPoly::constant(self.chart, Scalar::hbar_power(1)), false, true)),
                "i" => Ok((SuperPoly::constant(self.chart, Scalar::i()), false, false)),
                _ => match self.chart.find(&name) {
                    Some(g) => Ok((SuperPoly::var(self.chart, g.index), g.parity.is_odd(), false)),
                    None => {
                        self.pos -= 1;
                        self.err(format!("unknown generator `{name}`"))
                    }
                },
            },
            Some(Tok::LParen) => {
                let v = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return self.err("expected `)`");
                }
                Ok((v, false, false))
            }
            Some(_) => {
                self.pos -= 1;
                self.err("expected a number, generator or `(`")
            }
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse `src` as a polynomial on `chart`.
pub fn parse_poly(chart: &Arc<Chart>, src: &str) -> Result<SuperPoly> {
    let toks = lex(src)?;
    let end = src
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = Parser {
        toks,
        pos: 0,
        chart,
        end,
    };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::{Families, Parity};

    fn chart() -> Arc<Chart> {
        Chart::standard(&[("x", Parity::Even), ("y", Parity::Even)], Families::multivectors()).unwrap()
    }

    #[test]
    fn parses_polynomials_with_rationals() {
        let c = chart();
        let p = parse_poly(&c, "1/2*x^2*y_star - 3*(x + y)").unwrap();
        let x = SuperPoly::var_named(&c, "x").unwrap();
        let y = SuperPoly::var_named(&c, "y").unwrap();
        let ys = SuperPoly::var_named(&c, "y_star").unwrap();
        let expected = &(&(&x * &x) * &ys).scale(&Scalar::ratio(1, 2)) - &(&x + &y).scale_int(3);
        assert_eq!(p, expected);
    }

    #[test]
    fn odd_products_follow_written_order() {
        let c = chart();
        let a = parse_poly(&c, "y_star*x_star").unwrap();
        let b = parse_poly(&c, "x_star*y_star").unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn hbar_and_i_are_reserved() {
        let c = chart();
        let p = parse_poly(&c, "-i*hbar^-2").unwrap();
        assert_eq!(p.constant_term(), -(&Scalar::i() * &Scalar::hbar_power(-2)));
    }

    #[test]
    fn errors_carry_positions() {
        let c = chart();
        match parse_poly(&c, "x +\n  z") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly(&c, "x_star^2").is_err());
        assert!(parse_poly(&c, "x^-1").is_err());
        assert!(parse_poly(&c, "(x").is_err());
    }
}
