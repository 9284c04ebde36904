//! Expression trees for scalar functions of the coordinates `x` and `y`.
//!
//! An [`Expr2`] is a plain evaluation tree: no simplification, no symbolic
//! algebra beyond the derivative helper [`Expr2::diff`].  The curvature
//! machinery never differentiates expressions symbolically; it pushes jets
//! through the tree instead (see [`crate::jet`]).  `diff` exists so that
//! structured families (where a coefficient function and its derivatives
//! appear in closed form) can be assembled without hand-writing each
//! derivative.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

/// Coordinate variable of a bivariate expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Expression tree over `x`, `y`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr2 {
    Const(f64),
    X,
    Y,
    Add(Box<Expr2>, Box<Expr2>),
    Neg(Box<Expr2>),
    Mul(Box<Expr2>, Box<Expr2>),
    /// Integer power; the exponent may be negative.
    Pow(Box<Expr2>, i32),
    Exp(Box<Expr2>),
    Ln(Box<Expr2>),
    Sin(Box<Expr2>),
    Cos(Box<Expr2>),
}

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("expression undefined at ({x}, {y}): {reason}")]
    Domain { x: f64, y: f64, reason: String },
    #[error("non-finite value produced at ({x}, {y})")]
    Overflow { x: f64, y: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Expr2 {
    pub fn constant(v: f64) -> Self {
        Expr2::Const(v)
    }

    pub fn x() -> Self {
        Expr2::X
    }

    pub fn y() -> Self {
        Expr2::Y
    }

    pub fn add(a: Expr2, b: Expr2) -> Self {
        Expr2::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr2, b: Expr2) -> Self {
        Expr2::add(a, Expr2::neg(b))
    }

    pub fn neg(a: Expr2) -> Self {
        Expr2::Neg(Box::new(a))
    }

    pub fn mul(a: Expr2, b: Expr2) -> Self {
        Expr2::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr2, b: Expr2) -> Self {
        Expr2::mul(a, Expr2::pow(b, -1))
    }

    pub fn pow(a: Expr2, e: i32) -> Self {
        Expr2::Pow(Box::new(a), e)
    }

    pub fn exp(a: Expr2) -> Self {
        Expr2::Exp(Box::new(a))
    }

    pub fn ln(a: Expr2) -> Self {
        Expr2::Ln(Box::new(a))
    }

    pub fn sin(a: Expr2) -> Self {
        Expr2::Sin(Box::new(a))
    }

    pub fn cos(a: Expr2) -> Self {
        Expr2::Cos(Box::new(a))
    }

    /// Scale by a constant.
    pub fn scale(self, k: f64) -> Self {
        Expr2::mul(Expr2::Const(k), self)
    }

    /// Direct point evaluation.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        let v = self.eval_inner(x, y)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Overflow { x, y })
        }
    }

    fn eval_inner(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        let domain = |reason: &str| ExprError::Domain {
            x,
            y,
            reason: reason.to_string(),
        };
        Ok(match self {
            Expr2::Const(c) => *c,
            Expr2::X => x,
            Expr2::Y => y,
            Expr2::Add(a, b) => a.eval_inner(x, y)? + b.eval_inner(x, y)?,
            Expr2::Neg(a) => -a.eval_inner(x, y)?,
            Expr2::Mul(a, b) => a.eval_inner(x, y)? * b.eval_inner(x, y)?,
            Expr2::Pow(a, e) => {
                let base = a.eval_inner(x, y)?;
                if *e < 0 && base == 0.0 {
                    return Err(domain("negative power of zero"));
                }
                base.powi(*e)
            }
            Expr2::Exp(a) => a.eval_inner(x, y)?.exp(),
            Expr2::Ln(a) => {
                let arg = a.eval_inner(x, y)?;
                if arg <= 0.0 {
                    return Err(domain("log of non-positive argument"));
                }
                arg.ln()
            }
            Expr2::Sin(a) => a.eval_inner(x, y)?.sin(),
            Expr2::Cos(a) => a.eval_inner(x, y)?.cos(),
        })
    }

    /// Symbolic partial derivative with respect to `var`.
    ///
    /// Produces an unsimplified tree; intended for assembling coefficient
    /// functions of structured families, not as a general CAS.
    pub fn diff(&self, var: Var) -> Expr2 {
        match self {
            Expr2::Const(_) => Expr2::Const(0.0),
            Expr2::X => Expr2::Const(if var == Var::X { 1.0 } else { 0.0 }),
            Expr2::Y => Expr2::Const(if var == Var::Y { 1.0 } else { 0.0 }),
            Expr2::Add(a, b) => Expr2::add(a.diff(var), b.diff(var)),
            Expr2::Neg(a) => Expr2::neg(a.diff(var)),
            Expr2::Mul(a, b) => Expr2::add(
                Expr2::mul(a.diff(var), (**b).clone()),
                Expr2::mul((**a).clone(), b.diff(var)),
            ),
            Expr2::Pow(a, e) => {
                if *e == 0 {
                    Expr2::Const(0.0)
                } else {
                    Expr2::mul(
                        Expr2::mul(Expr2::Const(*e as f64), Expr2::pow((**a).clone(), e - 1)),
                        a.diff(var),
                    )
                }
            }
            Expr2::Exp(a) => Expr2::mul(self.clone(), a.diff(var)),
            Expr2::Ln(a) => Expr2::div(a.diff(var), (**a).clone()),
            Expr2::Sin(a) => Expr2::mul(Expr2::cos((**a).clone()), a.diff(var)),
            Expr2::Cos(a) => Expr2::neg(Expr2::mul(Expr2::sin((**a).clone()), a.diff(var))),
        }
    }

    /// Serialize into the JSON expression schema
    /// `{"op": "<kind>", "args": [...], "value": <number>}`.
    pub fn to_json(&self) -> Value {
        match self {
            Expr2::Const(c) => json!({"op": "const", "value": c}),
            Expr2::X => json!({"op": "x"}),
            Expr2::Y => json!({"op": "y"}),
            Expr2::Add(a, b) => json!({"op": "add", "args": [a.to_json(), b.to_json()]}),
            Expr2::Neg(a) => json!({"op": "neg", "args": [a.to_json()]}),
            Expr2::Mul(a, b) => json!({"op": "mul", "args": [a.to_json(), b.to_json()]}),
            Expr2::Pow(a, e) => json!({"op": "pow", "args": [a.to_json()], "value": e}),
            Expr2::Exp(a) => json!({"op": "exp", "args": [a.to_json()]}),
            Expr2::Ln(a) => json!({"op": "ln", "args": [a.to_json()]}),
            Expr2::Sin(a) => json!({"op": "sin", "args": [a.to_json()]}),
            Expr2::Cos(a) => json!({"op": "cos", "args": [a.to_json()]}),
        }
    }

    /// Parse the JSON expression schema.  `add` and `mul` accept two or more
    /// arguments and fold left.
    pub fn from_json(v: &Value) -> Result<Expr2, ExprError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ExprError::Parse("expected object".into()))?;
        let op = obj
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| ExprError::Parse("missing \"op\"".into()))?;
        let args = || -> Result<Vec<Expr2>, ExprError> {
            obj.get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| ExprError::Parse(format!("\"{op}\" requires \"args\"")))?
                .iter()
                .map(Expr2::from_json)
                .collect()
        };
        let unary = |kind: fn(Expr2) -> Expr2| -> Result<Expr2, ExprError> {
            let mut a = args()?;
            if a.len() != 1 {
                return Err(ExprError::Parse(format!("\"{op}\" takes one argument")));
            }
            Ok(kind(a.remove(0)))
        };
        let nary = |kind: fn(Expr2, Expr2) -> Expr2| -> Result<Expr2, ExprError> {
            let a = args()?;
            if a.len() < 2 {
                return Err(ExprError::Parse(format!(
                    "\"{op}\" takes at least two arguments"
                )));
            }
            let mut it = a.into_iter();
            let first = it.next().unwrap();
            Ok(it.fold(first, kind))
        };
        match op {
            "const" => {
                let c = obj
                    .get("value")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| ExprError::Parse("\"const\" requires numeric \"value\"".into()))?;
                Ok(Expr2::Const(c))
            }
            "x" => Ok(Expr2::X),
            "y" => Ok(Expr2::Y),
            "add" => nary(Expr2::add),
            "mul" => nary(Expr2::mul),
            "neg" => unary(Expr2::neg),
            "pow" => {
                let e = obj
                    .get("value")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| ExprError::Parse("\"pow\" requires integer \"value\"".into()))?;
                let mut a = args()?;
                if a.len() != 1 {
                    return Err(ExprError::Parse("\"pow\" takes one argument".into()));
                }
                Ok(Expr2::pow(a.remove(0), e as i32))
            }
            "exp" => unary(Expr2::exp),
            "ln" => unary(Expr2::ln),
            "sin" => unary(Expr2::sin),
            "cos" => unary(Expr2::cos),
            other => Err(ExprError::Parse(format!("unknown op \"{other}\""))),
        }
    }

    /// Parse the infix mini-language, e.g. `exp(y) + 0.5*y^2*(x+1)^-2`.
    ///
    /// Grammar: `+ - * /`, integer `^`, parentheses, `exp ln sin cos`,
    /// coordinates `x` and `y`, numeric literals, and named parameters
    /// supplied through `params`.
    pub fn parse(src: &str, params: &[(&str, f64)]) -> Result<Expr2, ExprError> {
        parser::parse(src, params)
    }
}

impl fmt::Display for Expr2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr2::Const(c) => write!(f, "{c}"),
            Expr2::X => write!(f, "x"),
            Expr2::Y => write!(f, "y"),
            Expr2::Add(a, b) => write!(f, "({a} + {b})"),
            Expr2::Neg(a) => write!(f, "(-{a})"),
            Expr2::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr2::Pow(a, e) => write!(f, "{a}^{e}"),
            Expr2::Exp(a) => write!(f, "exp({a})"),
            Expr2::Ln(a) => write!(f, "ln({a})"),
            Expr2::Sin(a) => write!(f, "sin({a})"),
            Expr2::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

mod parser {
    use super::{Expr2, ExprError};

    pub fn parse(src: &str, params: &[(&str, f64)]) -> Result<Expr2, ExprError> {
        let tokens = lex(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            params,
        };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(ExprError::Parse(format!(
                "unexpected trailing input at token {}",
                p.pos
            )));
        }
        Ok(e)
    }

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(f64),
        Ident(String),
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
        LParen,
        RParen,
    }

    fn lex(src: &str) -> Result<Vec<Tok>, ExprError> {
        let mut out = Vec::new();
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    out.push(Tok::Plus);
                    i += 1;
                }
                '-' => {
                    out.push(Tok::Minus);
                    i += 1;
                }
                '*' => {
                    out.push(Tok::Star);
                    i += 1;
                }
                '/' => {
                    out.push(Tok::Slash);
                    i += 1;
                }
                '^' => {
                    out.push(Tok::Caret);
                    i += 1;
                }
                '(' => {
                    out.push(Tok::LParen);
                    i += 1;
                }
                ')' => {
                    out.push(Tok::RParen);
                    i += 1;
                }
                c if c.is_ascii_digit() || c == '.' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_digit()
                            || chars[i] == '.'
                            || chars[i] == 'e'
                            || chars[i] == 'E'
                            || ((chars[i] == '+' || chars[i] == '-')
                                && i > start
                                && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                    {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    let n: f64 = text
                        .parse()
                        .map_err(|_| ExprError::Parse(format!("bad number \"{text}\"")))?;
                    out.push(Tok::Num(n));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push(Tok::Ident(chars[start..i].iter().collect()));
                }
                other => return Err(ExprError::Parse(format!("unexpected character '{other}'"))),
            }
        }
        Ok(out)
    }

    struct Parser<'a> {
        tokens: Vec<Tok>,
        pos: usize,
        params: &'a [(&'a str, f64)],
    }

    impl Parser<'_> {
        fn peek(&self) -> Option<&Tok> {
            self.tokens.get(self.pos)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.tokens.get(self.pos).cloned();
            if t.is_some() {
                self.pos += 1;
            }
            t
        }

        fn expr(&mut self) -> Result<Expr2, ExprError> {
            let mut lhs = self.term()?;
            while let Some(tok) = self.peek() {
                match tok {
                    Tok::Plus => {
                        self.next();
                        lhs = Expr2::add(lhs, self.term()?);
                    }
                    Tok::Minus => {
                        self.next();
                        lhs = Expr2::sub(lhs, self.term()?);
                    }
                    _ => break,
                }
            }
            Ok(lhs)
        }

        fn term(&mut self) -> Result<Expr2, ExprError> {
            let mut lhs = self.unary()?;
            while let Some(tok) = self.peek() {
                match tok {
                    Tok::Star => {
                        self.next();
                        lhs = Expr2::mul(lhs, self.unary()?);
                    }
                    Tok::Slash => {
                        self.next();
                        lhs = Expr2::div(lhs, self.unary()?);
                    }
                    _ => break,
                }
            }
            Ok(lhs)
        }

        fn unary(&mut self) -> Result<Expr2, ExprError> {
            match self.peek() {
                Some(Tok::Minus) => {
                    self.next();
                    Ok(Expr2::neg(self.unary()?))
                }
                Some(Tok::Plus) => {
                    self.next();
                    self.unary()
                }
                _ => self.power(),
            }
        }

        fn power(&mut self) -> Result<Expr2, ExprError> {
            let base = self.atom()?;
            if self.peek() == Some(&Tok::Caret) {
                self.next();
                let negative = if self.peek() == Some(&Tok::Minus) {
                    self.next();
                    true
                } else {
                    false
                };
                match self.next() {
                    Some(Tok::Num(n)) if n.fract() == 0.0 => {
                        let mut e = n as i32;
                        if negative {
                            e = -e;
                        }
                        Ok(Expr2::pow(base, e))
                    }
                    _ => Err(ExprError::Parse("exponent must be an integer literal".into())),
                }
            } else {
                Ok(base)
            }
        }

        fn atom(&mut self) -> Result<Expr2, ExprError> {
            match self.next() {
                Some(Tok::Num(n)) => Ok(Expr2::Const(n)),
                Some(Tok::LParen) => {
                    let e = self.expr()?;
                    match self.next() {
                        Some(Tok::RParen) => Ok(e),
                        _ => Err(ExprError::Parse("missing ')'".into())),
                    }
                }
                Some(Tok::Ident(name)) => match name.as_str() {
                    "x" => Ok(Expr2::X),
                    "y" => Ok(Expr2::Y),
                    "exp" | "ln" | "sin" | "cos" => {
                        if self.next() != Some(Tok::LParen) {
                            return Err(ExprError::Parse(format!("{name} requires '('")));
                        }
                        let arg = self.expr()?;
                        if self.next() != Some(Tok::RParen) {
                            return Err(ExprError::Parse("missing ')'".into()));
                        }
                        Ok(match name.as_str() {
                            "exp" => Expr2::exp(arg),
                            "ln" => Expr2::ln(arg),
                            "sin" => Expr2::sin(arg),
                            _ => Expr2::cos(arg),
                        })
                    }
                    _ => self
                        .params
                        .iter()
                        .find(|(n, _)| *n == name)
                        .map(|(_, v)| Expr2::Const(*v))
                        .ok_or_else(|| ExprError::Parse(format!("unknown identifier \"{name}\""))),
                },
                other => Err(ExprError::Parse(format!("unexpected token {other:?}"))),
            }
        }
    }
}
