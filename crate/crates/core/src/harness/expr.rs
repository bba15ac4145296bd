//! Arithmetic over named variables, used for model curves and for
//! parameters that depend on the dimension.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `log` (base 2), `ln`, `sqrt`, `exp`, `binom(a, b)`.
//! Constants: `e`, `pi`. Any other identifier is a variable.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub const GRAMMAR_HINT: &str = "expressions use numbers, variables (n, d), + - * / ^, parentheses, \
     and the functions log (base 2), ln, sqrt, exp, binom(a,b); e.g. \"n*log(n)\" or \"binom(n,4)*n\"";

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Log2,
    Ln,
    Sqrt,
    Exp,
    Binom,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "log" => Func::Log2,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "binom" => Func::Binom,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Binom => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Log2 => "log",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Binom => "binom",
        }
    }
}

/// Variable bindings.
pub type Vars = BTreeMap<String, f64>;

pub fn vars_n(n: f64) -> Vars {
    let mut v = Vars::new();
    v.insert("n".into(), n);
    v
}

/// `binom(a, b)` for real `a` and integer-valued `b`, via the product form.
pub fn binomial(a: f64, b: f64) -> f64 {
    if b < 0.0 || b.fract() != 0.0 {
        return f64::NAN;
    }
    let k = b as u64;
    if a.fract() == 0.0 && a >= 0.0 && b > a {
        return 0.0;
    }
    // symmetric reduction keeps the product short
    let k = if a.fract() == 0.0 && a >= 0.0 { k.min(a as u64 - k) } else { k };
    (0..k).fold(1.0, |acc, i| acc * (a - i as f64) / (i + 1) as f64)
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, src };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, vars: &Vars) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => match name.as_str() {
                "e" => std::f64::consts::E,
                "pi" => std::f64::consts::PI,
                _ => *vars
                    .get(name)
                    .ok_or_else(|| Error::Config(format!("unbound variable {name:?}")))?,
            },
            Expr::Neg(e) => -e.eval(vars)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| a.eval(vars)).collect::<Result<_>>()?;
                match f {
                    Func::Log2 => v[0].log2(),
                    Func::Ln => v[0].ln(),
                    Func::Sqrt => v[0].sqrt(),
                    Func::Exp => v[0].exp(),
                    Func::Binom => binomial(v[0], v[1]),
                }
            }
        })
    }

    /// Evaluate with only `n` bound.
    pub fn eval_n(&self, n: f64) -> Result<f64> {
        self.eval(&vars_n(n))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(s) => f.write_str(s),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    Op::Add => "+",
                    Op::Sub => "-",
                    Op::Mul => "*",
                    Op::Div => "/",
                    Op::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
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
            // exponent only when digits follow
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
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| {
                Error::Config(format!("bad number {text:?} at column {}; {GRAMMAR_HINT}", start + 1))
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Config(format!(
                "unexpected character {c:?} at column {}; {GRAMMAR_HINT}",
                i + 1
            )));
        }
    }
    Ok(out)
}

struct Parser<'s> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    src: &'s str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        let col = self
            .tokens
            .get(self.pos)
            .map(|t| t.0 + 1)
            .unwrap_or(self.src.chars().count() + 1);
        Error::Config(format!(
            "cannot parse {:?}: {what} at column {col}; {GRAMMAR_HINT}",
            self.src
        ))
    }

    fn peek_sym(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((_, Tok::Sym(c))) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_sym() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { Op::Add } else { Op::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_sym() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { Op::Mul } else { Op::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_sym() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_sym() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some((_, tok)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.peek_sym() != Some('(') {
                    return Ok(Expr::Var(name));
                }
                let func = Func::lookup(&name).ok_or_else(|| {
                    self.pos -= 1;
                    self.error(&format!("unknown function {name:?}"))
                })?;
                self.pos += 1;
                let mut args = vec![self.expr()?];
                while self.peek_sym() == Some(',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                if args.len() != func.arity() {
                    return Err(self.error(&format!(
                        "{name} takes {} argument(s), got {}",
                        func.arity(),
                        args.len()
                    )));
                }
                Ok(Expr::Call(func, args))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(_) => Err(self.error("unexpected symbol")),
        }
    }
}
