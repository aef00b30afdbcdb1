//! Infix polynomial expressions: `(x+1)*(x-1) + y^2`, `1/2*x - 3y`.
//!
//! Juxtaposition multiplies (`2x`), `^` takes a non-negative integer
//! exponent, and `/` divides by a nonzero constant only.

use num_traits::{One, Zero};

use super::{Context, Polynomial};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Bin('+', Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Bin('-', Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Bin('*', Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Bin('/', Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Token::Num(_) | Token::Ident(_) | Token::Op('('))) {
                lhs = Expr::Bin('*', Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat_op('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .parse()
                        .map_err(|_| Error::Parse(format!("exponent `{n}` is not a u32")))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(Error::Parse("expected integer exponent after `^`".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(rational::parse(&n)?))
            }
            Some(Token::Ident(v)) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser { tokens: tokenize(s)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input in `{s}`")));
    }
    Ok(e)
}

fn collect_vars(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Num(_) => {}
        Expr::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Expr::Neg(a) | Expr::Pow(a, _) => collect_vars(a, out),
        Expr::Bin(_, a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
    }
}

fn build(e: &Expr, ctx: &Context) -> Result<Polynomial> {
    Ok(match e {
        Expr::Num(r) => Polynomial::constant(ctx, r.clone()),
        Expr::Var(v) => Polynomial::var(ctx, v)?,
        Expr::Neg(a) => -build(a, ctx)?,
        Expr::Pow(a, k) => build(a, ctx)?.pow(*k)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (build(a, ctx)?, build(b, ctx)?);
            match op {
                '+' => a.checked_add(&b)?,
                '-' => a.checked_sub(&b)?,
                '*' => a.checked_mul(&b)?,
                '/' => {
                    if !b.is_constant() || b.is_zero() {
                        return Err(Error::Parse("division only by nonzero constants".into()));
                    }
                    let c = b.terms().next().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero);
                    a.scale(&(Rational::one() / c))
                }
                _ => unreachable!("parser emits only + - * /"),
            }
        }
    })
}

/// Parses `s` in an existing context.
pub fn parse_polynomial(s: &str, ctx: &Context) -> Result<Polynomial> {
    build(&parse_expr(s)?, ctx)
}

/// Parses several expressions into one shared context: `x` and `y` first
/// when present, then other variables in order of first appearance.
pub fn parse_system<S: AsRef<str>>(exprs: &[S]) -> Result<(Context, Vec<Polynomial>)> {
    let parsed = exprs.iter().map(|s| parse_expr(s.as_ref())).collect::<Result<Vec<_>>>()?;
    let mut seen = Vec::new();
    for e in &parsed {
        collect_vars(e, &mut seen);
    }
    let mut names: Vec<String> = ["x", "y"]
        .iter()
        .filter(|v| seen.iter().any(|s| s == *v))
        .map(|v| v.to_string())
        .collect();
    names.extend(seen.into_iter().filter(|s| s != "x" && s != "y"));
    let ctx = Context::new(names);
    let polys = parsed.iter().map(|e| build(e, &ctx)).collect::<Result<Vec<_>>>()?;
    Ok((ctx, polys))
}
