//! Recursive descent over
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := '-' factor | base ('^' '-'? integer)?
//! base     := rational | 't' | '(' expr ')'
//! rational := integer ('/' positive-integer)?
//! ```

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{RatFunc, Rational};

const MAX_EXPONENT: i64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    SyntaxError { line: usize, col: usize, expected: String },
    #[error("division by zero at {line}:{col}")]
    DivisionByZero { line: usize, col: usize },
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("invalid document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
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
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
                col += 1;
            }
            let s: String = chars[start..i].iter().collect();
            toks.push((Tok::Int(s.parse().expect("digits")), l0, c0));
            continue;
        }
        let tok = match c {
            't' => Tok::T,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError::SyntaxError {
                    line: l0,
                    col: c0,
                    expected: "number, 't', operator or parenthesis".into(),
                })
            }
        };
        toks.push((tok, l0, c0));
        i += 1;
        col += 1;
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::SyntaxError { line, col, expected: expected.into() })
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.bump();
                    let (line, col) = self.here();
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).map_err(|_| ParseError::DivisionByZero { line, col })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let (line, col) = self.here();
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let Tok::Int(e) = self.peek().clone() else { return self.fail("integer exponent") };
        let Some(e) = e.to_i64().filter(|e| *e <= MAX_EXPONENT) else {
            return self.fail("exponent of at most 100000");
        };
        self.bump();
        let e = if negative { -e } else { e };
        base.pow(e).map_err(|_| ParseError::DivisionByZero { line, col })
    }

    fn base(&mut self) -> Result<RatFunc, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    if let Tok::Int(d) = self.peek_at(1).clone() {
                        self.bump();
                        let (line, col) = self.here();
                        self.bump();
                        if d.is_zero() {
                            return Err(ParseError::DivisionByZero { line, col });
                        }
                        return Ok(RatFunc::constant(Rational::new(n, d)));
                    }
                }
                Ok(RatFunc::constant(Rational::from_integer(n)))
            }
            Tok::T => {
                self.bump();
                Ok(RatFunc::t())
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail("')'");
                }
                self.bump();
                Ok(e)
            }
            _ => self.fail("number, 't' or '('"),
        }
    }
}

/// Parses a rational function; the result is in canonical form.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc, ParseError> {
    let mut p = Parser { toks: lex(src)?.toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("operator or end of input");
    }
    Ok(e)
}

/// Parses a rational constant such as `-3/4`.
pub fn parse_rational(src: &str) -> Result<Rational, ParseError> {
    let v = parse_ratfunc(src)?;
    v.as_constant().ok_or_else(|| ParseError::SyntaxError {
        line: 1,
        col: 1,
        expected: "a rational constant".into(),
    })
}
