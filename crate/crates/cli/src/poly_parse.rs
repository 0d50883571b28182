//! Recursive-descent parser for the polynomial input language.
//!
//! Grammar:
//!
//! ```text
//! expr   := ("+" | "-")? term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ("^" natural)?
//! atom   := natural | variable | "(" expr ")"
//! ```
//!
//! Whitespace is insignificant; juxtaposition is not multiplication.

use slopecm::poly::Polynomial;
use slopecm::rat::rat;
use slopecm::ring::{Ring, MAX_TOTAL_DEGREE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Nat(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, column);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            _ if ch.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '+' | '-' | '*' | '^' | '(' | ')' => {
                chars.next();
                column += 1;
                let tok = match ch {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push(Spanned { tok, line: l, column: c });
            }
            _ if ch.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                let n: u64 = s.parse().map_err(|_| ParseError {
                    line: l,
                    column: c,
                    message: format!("integer literal `{s}` is too large"),
                })?;
                out.push(Spanned { tok: Tok::Nat(n), line: l, column: c });
            }
            _ if ch.is_ascii_alphabetic() || ch == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '#' {
                        s.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line: l, column: c });
            }
            _ => {
                return Err(ParseError {
                    line: l,
                    column: c,
                    message: format!("unexpected character `{ch}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    ring: &'a Ring,
    end_line: usize,
    end_column: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(s) => (s.line, s.column),
            None => (self.end_line, self.end_column),
        }
    }

    fn fail(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, message: message.into() }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut negate = false;
        if let Some(s) = self.peek() {
            match s.tok {
                Tok::Plus => {
                    self.next();
                }
                Tok::Minus => {
                    self.next();
                    negate = true;
                }
                _ => {}
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(s) = self.peek() {
            match s.tok {
                Tok::Plus => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Tok::Minus => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Star)) {
            self.next();
            let f = self.factor()?;
            let bound = acc.total_degree() + f.total_degree();
            if bound > MAX_TOTAL_DEGREE && !acc.is_zero() && !f.is_zero() {
                return Err(self.fail(format!(
                    "total degree {bound} exceeds the cap {MAX_TOTAL_DEGREE}"
                )));
            }
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.next();
            let (line, column) = self.here();
            match self.next() {
                Some(Spanned { tok: Tok::Nat(n), .. }) => {
                    let bound = base.total_degree() as u64 * n;
                    if bound > MAX_TOTAL_DEGREE as u64 {
                        return Err(ParseError {
                            line,
                            column,
                            message: format!(
                                "total degree {bound} exceeds the cap {MAX_TOTAL_DEGREE}"
                            ),
                        });
                    }
                    Ok(base.pow(n as u32))
                }
                _ => Err(ParseError {
                    line,
                    column,
                    message: "expected a natural number after `^`".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let (line, column) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Nat(n), .. }) => {
                Ok(Polynomial::constant(self.ring, rat(n as i64)))
            }
            Some(Spanned { tok: Tok::Ident(name), .. }) => {
                Polynomial::var_named(self.ring, &name).map_err(|_| ParseError {
                    line,
                    column,
                    message: format!("unknown variable `{name}`"),
                })
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Spanned { tok: Tok::RParen, .. }) => Ok(inner),
                    _ => Err(ParseError { line, column, message: "unclosed parenthesis".into() }),
                }
            }
            Some(s) => Err(ParseError {
                line: s.line,
                column: s.column,
                message: "expected a number, variable or parenthesized expression".into(),
            }),
            None => Err(ParseError {
                line,
                column,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses one polynomial in the given ring.
pub fn parse_polynomial(text: &str, ring: &Ring) -> Result<Polynomial, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "empty input".into() });
    }
    let end_line = text.lines().count().max(1);
    let end_column = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser { toks, pos: 0, ring, end_line, end_column };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.fail("trailing input after the expression"));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use slopecm::rat::rat;
    use slopecm::ring::{Monomial, RingSpec};

    fn ring() -> Ring {
        RingSpec::standard(&["x0", "x1", "x2"]).unwrap()
    }

    #[test]
    fn parses_the_evident_polynomial() {
        let r = ring();
        let p = parse_polynomial("x0^2 - 2*x1*x2", &r).unwrap();
        let x0 = Polynomial::var(&r, 0);
        let x1 = Polynomial::var(&r, 1);
        let x2 = Polynomial::var(&r, 2);
        assert_eq!(p, x0.pow(2).sub(&x1.mul(&x2).scale(&rat(2))));
    }

    #[test]
    fn error_positions_are_reported() {
        let r = ring();
        let err = parse_polynomial("x0 + ", &r).unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        let err = parse_polynomial("", &r).unwrap_err();
        assert_eq!((err.line, err.column), (1, 1));
        let err = parse_polynomial("x0 + zz", &r).unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        assert!(err.message.contains("zz"));
        // juxtaposition is not multiplication
        let err = parse_polynomial("x0 x1", &r).unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        // malformed exponent
        let err = parse_polynomial("x0^x1", &r).unwrap_err();
        assert!(err.message.contains("natural number"));
    }

    #[test]
    fn binomial_cube_expands() {
        let r = ring();
        let p = parse_polynomial("(x0+x1)^3", &r).unwrap();
        assert_eq!(p.num_terms(), 4);
        let m = Monomial::new(smallvec::smallvec![2u16, 1, 0]);
        assert_eq!(p.coeff(&m), rat(3));
    }

    #[test]
    fn render_round_trips() {
        let r = ring();
        for text in ["x0^2 - 2*x1*x2", "3*x0*x1 + x2^4 - 7", "0", "1", "- x0 + x1"] {
            let p = parse_polynomial(text, &r).unwrap();
            let back = parse_polynomial(&p.render(), &r).unwrap();
            assert_eq!(p, back, "{text}");
        }
    }

    #[test]
    fn degree_cap_is_a_parse_error() {
        let r = ring();
        assert!(parse_polynomial("x0^65", &r).is_err());
        assert!(parse_polynomial("x0^40 * x0^40", &r).is_err());
        assert!(parse_polynomial("x0^64", &r).is_ok());
    }
}
