//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' atom)? | '-' factor
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Identifiers cover the fixed vocabulary plus unknown-function derivative
//! suffixes: `f_z`, `f_zw`, `u_xy`, `g'`, `g''`. A bare `f`/`g`/`u` is the
//! plain symbol; the suffixed or applied forms are unknown-function nodes.

use super::{normalize, Expr, Q, UnknownFn};
use crate::sym::{Func, Sym};
use num_bigint::BigInt;
use num_traits::One;
use std::fmt;

#[derive(Clone, PartialEq, Debug)]
pub enum ParseError {
    Syntax {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    UnknownName {
        offset: usize,
        name: String,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                offset,
                expected,
                found,
            } => write!(f, "syntax error at offset {offset}: expected {expected}, found {found}"),
            ParseError::UnknownName { offset, name } => {
                write!(f, "unknown name `{name}` at offset {offset}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, PartialEq, Debug)]
pub(crate) enum Tok {
    Num(Q),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(q) => format!("number {q}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub kind: Tok,
    pub offset: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let offset = i;
        let kind = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut denom = BigInt::one();
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    denom = BigInt::from(10u32).pow((i - frac_start) as u32);
                }
                let digits: String = text[start..i].chars().filter(|c| *c != '.').collect();
                if digits.is_empty() {
                    return Err(ParseError::Syntax {
                        offset,
                        expected: "digits",
                        found: "`.`".into(),
                    });
                }
                let numer: BigInt = digits.parse().expect("digit string");
                Tok::Num(Q::new(numer, denom))
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let mut name = text[start..i].to_string();
                while i < bytes.len() && bytes[i] == b'\'' {
                    name.push('\'');
                    i += 1;
                }
                Tok::Ident(name)
            }
            other => {
                return Err(ParseError::Syntax {
                    offset,
                    expected: "a token",
                    found: format!("`{other}`"),
                })
            }
        };
        toks.push(Token { kind, offset });
    }
    toks.push(Token {
        kind: Tok::Eof,
        offset: bytes.len(),
    });
    Ok(toks)
}

/// An identifier resolved against the vocabulary.
enum Head {
    Variable(Sym),
    Constant(Sym),
    Elem(Func),
    /// Unknown function with a derivative multi-index (possibly zero).
    Unk(Sym, Vec<u32>),
}

fn classify_ident(name: &str, offset: usize) -> Result<Head, ParseError> {
    // Prime suffixes: g', g''.
    if let Some(base) = name.strip_suffix('\'') {
        let mut primes = 1u32;
        let mut base = base;
        while let Some(b) = base.strip_suffix('\'') {
            primes += 1;
            base = b;
        }
        let sym = Sym::from_name(base).filter(|s| s.unknown_signature().is_some());
        if let Some(sym) = sym {
            let sig = sym.unknown_signature().unwrap();
            if sig.len() == 1 {
                return Ok(Head::Unk(sym, vec![primes]));
            }
        }
        return Err(ParseError::UnknownName {
            offset,
            name: name.into(),
        });
    }
    // Underscore derivative suffixes: f_z, f_zw, u_xy.
    if let Some((head, suffix)) = name.split_once('_') {
        let sym = Sym::from_name(head).filter(|s| s.unknown_signature().is_some());
        if let (Some(sym), false) = (sym, suffix.is_empty()) {
            let sig = sym.unknown_signature().unwrap();
            let mut deriv = vec![0u32; sig.len()];
            for ch in suffix.chars() {
                let slot = sig
                    .iter()
                    .position(|s| s.name() == ch.to_string())
                    .ok_or_else(|| ParseError::UnknownName {
                        offset,
                        name: name.into(),
                    })?;
                deriv[slot] += 1;
            }
            return Ok(Head::Unk(sym, deriv));
        }
        return Err(ParseError::UnknownName {
            offset,
            name: name.into(),
        });
    }
    if let Some(f) = Func::from_name(name) {
        return Ok(Head::Elem(f));
    }
    match Sym::from_name(name) {
        Some(s) if s.is_variable_name() => Ok(Head::Variable(s)),
        Some(s) if s.is_constant_name() => Ok(Head::Constant(s)),
        _ => Err(ParseError::UnknownName {
            offset,
            name: name.into(),
        }),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        let t = self.bump();
        if t.kind == want {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: t.offset,
                expected,
                found: t.kind.describe(),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::Sum(vec![acc, self.term()?]);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = Expr::Sum(vec![acc, Expr::Prod(vec![Expr::int(-1), t])]);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().kind {
                Tok::Star => {
                    self.bump();
                    acc = Expr::Prod(vec![acc, self.factor()?]);
                }
                Tok::Slash => {
                    self.bump();
                    let f = self.factor()?;
                    acc = Expr::Prod(vec![acc, Expr::Pow(Box::new(f), Box::new(Expr::int(-1)))]);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek().kind == Tok::Minus {
            self.bump();
            let f = self.factor()?;
            return Ok(Expr::Prod(vec![Expr::int(-1), f]));
        }
        let base = self.atom()?;
        if self.peek().kind == Tok::Caret {
            self.bump();
            let exp = self.atom()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn arg_list(&mut self, arity: usize, head_offset: usize) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.expr()?];
        while self.peek().kind == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if args.len() != arity {
            return Err(ParseError::Syntax {
                offset: head_offset,
                expected: "matching argument count",
                found: format!("{} arguments", args.len()),
            });
        }
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.kind {
            Tok::Num(q) => Ok(Expr::Num(q)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let head = classify_ident(&name, t.offset)?;
                let has_args = self.peek().kind == Tok::LParen;
                match head {
                    Head::Variable(s) => {
                        if has_args {
                            // An applied unknown function: f(z,w), u(x,y,t).
                            if let Some(sig) = s.unknown_signature() {
                                let args = self.arg_list(sig.len(), t.offset)?;
                                return Ok(Expr::Unknown(UnknownFn::new(
                                    s,
                                    args,
                                    vec![0; sig.len()],
                                )));
                            }
                            return Err(ParseError::Syntax {
                                offset: self.peek().offset,
                                expected: "an operator",
                                found: "`(`".into(),
                            });
                        }
                        Ok(Expr::Var(s))
                    }
                    Head::Constant(s) => {
                        if has_args {
                            return Err(ParseError::Syntax {
                                offset: self.peek().offset,
                                expected: "an operator",
                                found: "`(`".into(),
                            });
                        }
                        Ok(Expr::Const(s))
                    }
                    Head::Elem(f) => {
                        self.expect(Tok::LParen, "`(`")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Func(f, Box::new(arg)))
                    }
                    Head::Unk(sym, deriv) => {
                        let sig = sym.unknown_signature().unwrap();
                        let args = if has_args {
                            self.arg_list(sig.len(), t.offset)?
                        } else {
                            sig.iter().map(|s| Expr::Var(*s)).collect()
                        };
                        Ok(Expr::Unknown(UnknownFn::new(sym, args, deriv)))
                    }
                }
            }
            other => Err(ParseError::Syntax {
                offset: t.offset,
                expected: "a number, identifier, `-` or `(`",
                found: other.describe(),
            }),
        }
    }
}

/// Parses grammar-conformant text into a normalized expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    let t = p.bump();
    if t.kind != Tok::Eof {
        return Err(ParseError::Syntax {
            offset: t.offset,
            expected: "end of input",
            found: t.kind.describe(),
        });
    }
    Ok(normalize(&e))
}
