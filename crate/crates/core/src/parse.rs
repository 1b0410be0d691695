//! Text syntax for ring elements and stabilizer elements.
//!
//! ```text
//! stab   := expr (';' expr)*
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 't' | 'u' digits | '(' expr ')'
//! ```

use std::fmt;

use crate::arith::{FieldCtx, WittCtx};
use crate::poly::PolyRing;
use crate::ring::Ring;

/// A ring whose elements can be written with named generators.
pub trait Parseable: Ring {
    fn atom(&self, name: &str) -> Option<Self::Elt>;
}

impl Parseable for WittCtx {
    fn atom(&self, name: &str) -> Option<Self::Elt> {
        (name == "t").then(|| self.gen())
    }
}

impl Parseable for FieldCtx {
    fn atom(&self, name: &str) -> Option<Self::Elt> {
        (name == "t").then(|| self.gen())
    }
}

impl Parseable for PolyRing {
    fn atom(&self, name: &str) -> Option<Self::Elt> {
        if name == "t" {
            if self.is_weighted() {
                return Some(self.constant(&self.witt().gen()));
            }
            return None;
        }
        let i: usize = name.strip_prefix('u')?.parse().ok()?;
        (i >= 1 && i <= self.nvars()).then(|| self.u(i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: expected {}, found {}", self.pos, self.expected.join(" | "), self.found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer {s}"),
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut offsets = Vec::with_capacity(bytes.len());
    let mut off = 0;
    for c in &bytes {
        offsets.push(off);
        off += c.len_utf8();
    }
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((offsets[start], Tok::Int(bytes[start..i].iter().collect())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || (c == 'u' && bytes[i] == '_')) {
                i += 1;
            }
            let s: String = bytes[start..i].iter().filter(|&&ch| ch != '_').collect();
            out.push((offsets[start], Tok::Ident(s)));
        } else if "+-*^();".contains(c) {
            out.push((offsets[i], Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError {
                pos: offsets[i],
                expected: vec!["integer".into(), "identifier".into(), "operator".into()],
                found: format!("'{c}'"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a, R: Parseable> {
    ring: &'a R,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

const ATOM_START: [&str; 5] = ["integer", "t", "u<i>", "'('", "'-'"];

impl<'a, R: Parseable> Parser<'a, R> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }
    fn pos(&self) -> usize {
        self.toks[self.at].0
    }
    fn err(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<R::Elt, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.at += 1;
                    let t = self.term()?;
                    acc = self.ring.add(&acc, &t);
                }
                Tok::Sym('-') => {
                    self.at += 1;
                    let t = self.term()?;
                    acc = self.ring.sub(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<R::Elt, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Sym('*') {
            self.at += 1;
            let f = self.unary()?;
            acc = self.ring.mul(&acc, &f);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<R::Elt, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.at += 1;
            let v = self.unary()?;
            return Ok(self.ring.neg(&v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<R::Elt, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.at += 1;
            let Tok::Int(s) = self.peek().clone() else {
                return Err(self.err(&["integer exponent"]));
            };
            let e: u64 = s.parse().map_err(|_| self.err(&["exponent below 2^64"]))?;
            self.at += 1;
            return Ok(self.ring.pow(&base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<R::Elt, ParseError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let v: i64 = s.parse().map_err(|_| self.err(&["integer below 2^63"]))?;
                self.at += 1;
                Ok(self.ring.from_i64(v))
            }
            Tok::Ident(name) => match self.ring.atom(&name) {
                Some(v) => {
                    self.at += 1;
                    Ok(v)
                }
                None => Err(self.err(&ATOM_START)),
            },
            Tok::Sym('(') => {
                self.at += 1;
                let v = self.expr()?;
                if *self.peek() != Tok::Sym(')') {
                    return Err(self.err(&["')'", "'+'", "'-'", "'*'"]));
                }
                self.at += 1;
                Ok(v)
            }
            _ => Err(self.err(&ATOM_START)),
        }
    }
}

/// Parses a single ring element such as `2+t^2` or `3*u1 - 1`.
pub fn parse_elt<R: Parseable>(ring: &R, text: &str) -> Result<R::Elt, ParseError> {
    let mut p = Parser { ring, toks: lex(text)?, at: 0 };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(&["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(v)
}

/// Parses a `;`-separated list of ring elements, padding with zeros to `len`.
pub fn parse_list<R: Parseable>(ring: &R, text: &str, len: usize) -> Result<Vec<R::Elt>, ParseError> {
    let mut p = Parser { ring, toks: lex(text)?, at: 0 };
    let mut out = vec![p.expr()?];
    loop {
        match p.peek() {
            Tok::End => break,
            Tok::Sym(';') => {
                if out.len() == len {
                    return Err(p.err(&["'+'", "'-'", "'*'", "end of input"]));
                }
                p.at += 1;
                out.push(p.expr()?);
            }
            _ => return Err(p.err(&["'+'", "'-'", "'*'", "';'", "end of input"])),
        }
    }
    out.resize(len, ring.zero());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witt_elements() {
        let w = WittCtx::new(3, 2, 2).unwrap();
        assert_eq!(parse_elt(&w, "2+t^1").unwrap(), w.from_coeffs(&[2, 1]));
        assert_eq!(parse_elt(&w, " -(1 + t) * 2 ").unwrap(), w.from_coeffs(&[-2, -2]));
        assert_eq!(parse_elt(&w, "t^2").unwrap(), w.mul(&w.gen(), &w.gen()));
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let w = WittCtx::new(3, 2, 2).unwrap();
        let e = parse_elt(&w, "1 + * t").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(e.expected.contains(&"integer".to_string()));
        let e = parse_list(&w, "1;; 1", 2).unwrap_err();
        assert_eq!(e.pos, 2);
        let e = parse_elt(&w, "1 + s").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(parse_list(&w, "1;1;1", 2).is_err());
    }

    #[test]
    fn lists_pad_with_zero() {
        let w = WittCtx::new(3, 2, 2).unwrap();
        assert_eq!(parse_list(&w, "1", 2).unwrap(), vec![w.one(), w.zero()]);
        assert_eq!(parse_list(&w, "1; 1", 2).unwrap(), vec![w.one(), w.one()]);
    }

    #[test]
    fn deformation_ring_elements() {
        let r = PolyRing::deformation(3, 2, 3).unwrap();
        let v = parse_elt(&r, "1 + 4*u1 + u_1^2").unwrap();
        assert_eq!(r.format(&v), "1 + 4*u1 + u1^2");
        assert_eq!(parse_elt(&r, &r.format(&v)).unwrap(), v);
        assert!(parse_elt(&r, "u2").is_err());
    }
}
