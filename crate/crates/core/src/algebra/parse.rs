//! Parser for the canonical text format.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := ["-"] term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := (integer | name) ["^" integer]
//! ```
//!
//! Factors are multiplied in the order written, so `x2*x1` parses to
//! `-x1*x2`.

use std::sync::Arc;

use super::element::Element;
use super::monomial::normalize_word;
use super::table::GeneratorTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(u64),
    Name(String),
    Star,
    Caret,
    Plus,
    Minus,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_whitespace() => i += 1,
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v = text[start..i].parse::<u64>().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "integer out of range".into(),
                })?;
                out.push((start, Token::Int(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((start, Token::Name(text[start..i].to_string())));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    table: &'a Arc<GeneratorTable>,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |(p, _)| *p)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        }
    }

    fn int(&mut self) -> Result<u64> {
        match self.peek() {
            Some(Token::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn term(&mut self) -> Result<Element> {
        let f = *self.table.field();
        let mut coeff = 1u32;
        let mut word: Vec<usize> = Vec::new();
        loop {
            match self.peek().cloned() {
                Some(Token::Int(v)) => {
                    self.pos += 1;
                    let mut c = (v % f.p() as u64) as u32;
                    if self.peek() == Some(&Token::Caret) {
                        self.pos += 1;
                        let e = self.int()?;
                        c = f.pow(c, e);
                    }
                    coeff = f.mul(coeff, c);
                }
                Some(Token::Name(name)) => {
                    let at = self.here();
                    self.pos += 1;
                    let g = self.table.index_of(&name).ok_or(Error::Parse {
                        pos: at,
                        msg: format!("unknown generator {name}"),
                    })?;
                    let mut e = 1;
                    if self.peek() == Some(&Token::Caret) {
                        self.pos += 1;
                        e = self.int()?;
                    }
                    if self.table.is_odd(g) && e >= 2 {
                        return Ok(Element::zero(self.table));
                    }
                    word.extend(std::iter::repeat(g).take(e as usize));
                }
                _ => return Err(self.err("expected a coefficient or generator")),
            }
            if self.peek() == Some(&Token::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        match normalize_word(self.table, &word)? {
            None => Ok(Element::zero(self.table)),
            Some((sign, m)) => {
                let c = if sign < 0 { f.neg(coeff) } else { coeff };
                Ok(Element::from_terms(self.table, [(m, c)]))
            }
        }
    }

    fn expr(&mut self) -> Result<Element> {
        let mut negate = false;
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            negate = true;
        }
        let mut acc = Element::zero(self.table);
        loop {
            let t = self.term()?;
            if negate {
                acc = &acc - &t;
            } else {
                acc.add_assign_ref(&t);
            }
            match self.peek() {
                None => break,
                Some(Token::Plus) => {
                    self.pos += 1;
                    negate = false;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    negate = true;
                }
                Some(_) => return Err(self.err("expected '+' or '-'")),
            }
        }
        Ok(acc)
    }
}

pub fn parse_element(table: &Arc<GeneratorTable>, text: &str) -> Result<Element> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        table,
        tokens,
        pos: 0,
        len: text.len(),
    };
    parser.expr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    fn t() -> Arc<GeneratorTable> {
        GeneratorTable::cohomology(FieldConfig::new(5).unwrap(), 3).unwrap()
    }

    #[test]
    fn whitespace_insensitive() {
        let t = t();
        let a = parse_element(&t, "2*x1*y2^3+y3").unwrap();
        let b = parse_element(&t, "  2 * x1 * y2 ^ 3  +  y3 ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn written_order_carries_sign() {
        let t = t();
        assert_eq!(
            parse_element(&t, "x2*x1").unwrap(),
            parse_element(&t, "4*x1*x2").unwrap()
        );
        assert!(parse_element(&t, "x1*y1*x1").unwrap().is_zero());
        assert!(parse_element(&t, "x1^2").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_position() {
        let t = t();
        match parse_element(&t, "x1 + z9") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_element(&t, "x1 +").is_err());
        assert!(parse_element(&t, "").is_err());
        assert!(parse_element(&t, "x1 ? y1").is_err());
    }

    #[test]
    fn constants_and_minus() {
        let t = t();
        assert_eq!(parse_element(&t, "0").unwrap(), Element::zero(&t));
        assert_eq!(parse_element(&t, "-y1").unwrap(), parse_element(&t, "4*y1").unwrap());
        assert_eq!(parse_element(&t, "2^3").unwrap(), Element::constant(&t, 8));
    }
}
