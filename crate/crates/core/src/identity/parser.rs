//! Recursive-descent parser for identity text.
//!
//! ```text
//! equation := expr "==" expr
//! expr     := term (("+" | "-") term)*
//! term     := unary ("*" unary)*
//! unary    := "-" unary | power
//! power    := primary ("^" primary)?
//! primary  := integer | "e" | "r" | "n" | "(" expr ")"
//!           | name "(" index ")"
//!           | ("A" | "B") "[" name "]" "(" index "," index ")"
//!           | ("a" | "b" | "c") "[" name "]"
//! ```
//!
//! `index` is an expr built only from integers and variables; exponents are
//! restricted the same way.

use num_bigint::BigInt;
use thiserror::Error;

use super::expr::{Coeff, Equation, Expr, Param, Var};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    EqEq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let tok = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().unwrap()), start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'=' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::EqEq
            }
            _ => {
                let c = text[i..].chars().next().unwrap();
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if tok != Tok::Eof {
            self.at += 1;
        }
        tok
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    fn equation(&mut self) -> Result<Equation, ParseError> {
        let lhs = self.expr()?;
        self.expect(Tok::EqEq)?;
        let rhs = self.expr()?;
        self.expect(Tok::Eof)?;
        Ok(Equation { lhs, rhs })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = self.index(Self::primary)?;
        if *self.peek() == Tok::Caret {
            return self.error("chained `^` is not supported; add parentheses");
        }
        Ok(Expr::Pow(Box::new(base), Box::new(exponent)))
    }

    /// Parses with `f` and requires the result to be an index expression.
    fn index(&mut self, f: fn(&mut Self) -> Result<Expr, ParseError>) -> Result<Expr, ParseError> {
        let start = self.pos();
        let expr = f(self)?;
        if !expr.is_index() {
            return Err(ParseError {
                pos: start,
                msg: "indices and exponents may only use integers and e, r, n".into(),
            });
        }
        Ok(expr)
    }

    fn seq_name(&mut self) -> Result<String, ParseError> {
        if let Tok::Ident(name) = self.peek() {
            if Var::from_name(name).is_none() {
                let name = name.clone();
                self.bump();
                return Ok(name);
            }
        }
        self.error(format!(
            "expected sequence name, found {}",
            self.peek().describe()
        ))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => match self.peek() {
                Tok::LParen => {
                    if Var::from_name(&name).is_some() {
                        return Err(ParseError {
                            pos,
                            msg: format!("`{name}` is a variable, not a sequence"),
                        });
                    }
                    self.bump();
                    let index = self.index(Self::expr)?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Term {
                        seq: name,
                        index: Box::new(index),
                    })
                }
                Tok::LBracket => {
                    self.bump();
                    let seq = self.seq_name()?;
                    self.expect(Tok::RBracket)?;
                    match name.as_str() {
                        "A" | "B" => {
                            self.expect(Tok::LParen)?;
                            let e = self.index(Self::expr)?;
                            self.expect(Tok::Comma)?;
                            let r = self.index(Self::expr)?;
                            self.expect(Tok::RParen)?;
                            let which = if name == "A" { Coeff::A } else { Coeff::B };
                            Ok(Expr::Coeff {
                                which,
                                seq,
                                e: Box::new(e),
                                r: Box::new(r),
                            })
                        }
                        "a" | "b" | "c" => {
                            let which = match name.as_str() {
                                "a" => Param::A,
                                "b" => Param::B,
                                _ => Param::C,
                            };
                            Ok(Expr::Param { which, seq })
                        }
                        _ => Err(ParseError {
                            pos,
                            msg: format!("`{name}[..]` is not A, B, a, b or c"),
                        }),
                    }
                }
                _ => match Var::from_name(&name) {
                    Some(v) => Ok(Expr::Var(v)),
                    None => Err(ParseError {
                        pos,
                        msg: format!("unknown variable `{name}` (expected e, r or n)"),
                    }),
                },
            },
            other => Err(ParseError {
                pos,
                msg: format!("expected a term, found {}", other.describe()),
            }),
        }
    }
}

pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    Parser {
        toks: lex(text)?,
        at: 0,
    }
    .equation()
}

/// Parses a single expression (no `==`).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let expr = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(expr)
}
