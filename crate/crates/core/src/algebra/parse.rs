//! Reader for the polynomial text grammar.
//!
//! Terms are joined by `+`/`-`, products by `*`, powers by `^k`, with
//! parentheses. Variables are `x`, `x'`, `x''`, `x^(3)` (jet order), `s.x'`
//! (S-side) and `x_0` (Witt coordinate). Names the coefficient ring claims
//! (`t`, `u`) are read as ring constants.

use num_bigint::BigInt;

use super::poly::Poly;
use super::ring::Ring;
use super::var::{Var, VarKind};
use crate::error::{Error, Result};

struct Parser<'a, R: Ring> {
    src: &'a [u8],
    pos: usize,
    ring: &'a R,
}

pub fn parse_poly<R: Ring>(ring: &R, text: &str) -> Result<Poly<R>> {
    let normalized = text.replace('′', "'").replace('″', "''").replace('−', "-");
    let mut p = Parser { src: normalized.as_bytes(), pos: 0, ring };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

impl<R: Ring> Parser<'_, R> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly<R>> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.product()?.neg()
        } else {
            self.product()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Poly<R>> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly<R>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u64 = e.try_into().map_err(|_| self.error("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<Poly<R>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Poly::constant(self.ring, self.ring.from_int(&n)))
            }
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            _ => Err(self.error("expected term")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        String::from_utf8(self.src[start..self.pos].to_vec()).unwrap()
    }

    fn variable(&mut self) -> Result<Poly<R>> {
        let mut name = self.ident();
        let mut kind = VarKind::Jet;
        if name == "s" && self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            kind = VarKind::Side;
            name = self.ident();
            if name.is_empty() {
                return Err(self.error("expected name after 's.'"));
            }
        }
        let rest = &self.src[self.pos..];
        if kind == VarKind::Jet && rest.first() == Some(&b'_') {
            self.pos += 1;
            let idx = self.index()?;
            return Ok(Poly::var(self.ring, Var::witt(&name, idx)));
        }
        let mut order = 0u32;
        while self.src.get(self.pos) == Some(&b'\'') {
            order += 1;
            self.pos += 1;
        }
        if order == 0 && self.src[self.pos..].starts_with(b"^(") {
            self.pos += 2;
            order = self.index()?;
            if self.src.get(self.pos) != Some(&b')') {
                return Err(self.error("expected ')' after jet order"));
            }
            self.pos += 1;
        }
        if kind == VarKind::Jet && order == 0 {
            if let Some(c) = self.ring.atom(&name) {
                return Ok(Poly::constant(self.ring, c));
            }
        }
        Ok(Poly::var(self.ring, Var::new(kind, &name, order)))
    }

    fn index(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("expected index"))
    }
}
