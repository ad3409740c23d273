//! Scalar expressions in the chart coordinates `x1 … x7`.
//!
//! Syntax: numbers (`2`, `0.5`, `3/4`), coordinates `x1`..`x7`, the
//! operators `+ - * / ^`, parentheses, implicit multiplication (`2x1`,
//! `-2f`), and the functions `exp sin cos sqrt sinh cosh ln`. Exponents
//! must reduce to constants. Extra named symbols (such as `f`) can be bound
//! to other expressions when parsing.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::RealScalar;
use crate::DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Sinh,
    Cosh,
    Ln,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "ln" | "log" => Func::Ln,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Ln => "ln",
        }
    }

    fn apply<S: RealScalar>(self, x: S) -> S {
        match self {
            Func::Exp => x.exp(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sqrt => x.sqrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Ln => x.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 0-based coordinate index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        Self::parse_with(text, &[])
    }

    /// Parses `text`, replacing each bound symbol by its expression.
    pub fn parse_with(text: &str, bindings: &[(&str, &Expr)]) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            bindings,
        };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("unexpected {:?} in {text:?}", p.tokens[p.pos])));
        }
        Ok(e)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn eval<S: RealScalar>(&self, x: &[S; DIM]) -> S {
        match self {
            Expr::Const(c) => S::from_f64(*c),
            Expr::Var(i) => x[*i].clone(),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Neg(a) => -a.eval(x),
            Expr::Pow(a, p) => {
                let base = a.eval(x);
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    base.powi(*p as i32)
                } else {
                    base.powf(*p)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn binary(op: char, a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::Const(match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => x / y,
            });
        }
        let (a, b) = (Box::new(a), Box::new(b));
        match op {
            '+' => Expr::Add(a, b),
            '-' => Expr::Sub(a, b),
            '*' => Expr::Mul(a, b),
            _ => Expr::Div(a, b),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Pow(a, p) => write!(f, "({a})^{p}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
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
            // scientific notation
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Token::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Token::RParen);
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    bindings: &'a [(&'a str, &'a Expr)],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Op(op @ ('*' | '/'))) => {
                    let op = *op;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::binary(op, lhs, rhs);
                }
                Some(Token::Num(_) | Token::Ident(_) | Token::LParen) => {
                    let rhs = self.power()?;
                    lhs = Expr::binary('*', lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                let e = self.unary()?;
                Ok(match e.as_const() {
                    Some(c) => Expr::Const(-c),
                    None => Expr::Neg(Box::new(e)),
                })
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            let p = exponent
                .as_const()
                .ok_or_else(|| Error::Parse("exponent must be a constant".into()))?;
            return Ok(match base.as_const() {
                Some(b) => Expr::Const(b.powf(p)),
                None => Expr::Pow(Box::new(base), p),
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Const(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            Some(Token::Ident(name)) => self.identifier(&name),
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }

    fn identifier(&mut self, name: &str) -> Result<Expr> {
        if let Some(func) = Func::from_name(name) {
            if self.next() != Some(Token::LParen) {
                return Err(Error::Parse(format!("{name} needs '('")));
            }
            let arg = self.expr()?;
            if self.next() != Some(Token::RParen) {
                return Err(Error::Parse("missing ')'".into()));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(k) = rest.parse::<usize>() {
                if (1..=DIM).contains(&k) {
                    return Ok(Expr::Var(k - 1));
                }
                return Err(Error::Parse(format!("coordinate {name} out of range x1..x7")));
            }
        }
        if name == "pi" {
            return Ok(Expr::Const(std::f64::consts::PI));
        }
        if let Some((_, e)) = self.bindings.iter().find(|(n, _)| *n == name) {
            return Ok((*e).clone());
        }
        Err(Error::Parse(format!("unknown symbol {name:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &str, x: [f64; 7]) -> f64 {
        Expr::parse(e).unwrap().eval(&x)
    }

    #[test]
    fn arithmetic_and_precedence() {
        let x = [1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.5];
        assert_eq!(at("1 + 2*3", x), 7.0);
        assert_eq!(at("-x1^2", x), -1.0);
        assert_eq!(at("2x2 x3", x), 12.0);
        assert_eq!(at("3/4 x2", x), 1.5);
        assert_eq!(at("x2^3 - x3/x2", x), 6.5);
        assert!((at("exp(2 x7) - cosh(0)", x) - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert_eq!(at("1e-1*10", x), 1.0);
    }

    #[test]
    fn bound_symbols() {
        let f = Expr::parse("x1 + x2").unwrap();
        let e = Expr::parse_with("-2f", &[("f", &f)]).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]), -6.0);
        assert!(Expr::parse("-2f").is_err());
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "x8", "1 +", "(x1", "foo(x1)", "x1^x2", "2 $ 3"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
    }
}
