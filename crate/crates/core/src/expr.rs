//! One-variable expressions (polynomials, exp, trig and friends) evaluated
//! together with their first two derivatives.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::dmath;
use crate::error::{QsError, QsResult};

/// Value with first and second derivative in one real variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Dual2 {
    pub fn constant(v: f64) -> Self {
        Dual2 { v, d: 0.0, dd: 0.0 }
    }

    pub fn variable(v: f64) -> Self {
        Dual2 { v, d: 1.0, dd: 0.0 }
    }

    /// Composes a scalar function given its value and first two derivatives at `self.v`.
    fn chain(self, f: f64, f1: f64, f2: f64) -> Self {
        Dual2 { v: f, d: f1 * self.d, dd: f2 * self.d * self.d + f1 * self.dd }
    }

    fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Dual2::constant(1.0);
        }
        let x = self.v;
        if p.fract() == 0.0 && p.abs() < 64.0 {
            let n = p as i32;
            let f = x.powi(n);
            let f1 = if n == 0 { 0.0 } else { p * x.powi(n - 1) };
            let f2 = if n == 0 || n == 1 { 0.0 } else { p * (p - 1.0) * x.powi(n - 2) };
            return self.chain(f, f1, f2);
        }
        self.chain(dmath::powf(x, p), p * dmath::powf(x, p - 1.0), p * (p - 1.0) * dmath::powf(x, p - 2.0))
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, o: Dual2) -> Dual2 {
        Dual2 { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, o: Dual2) -> Dual2 {
        Dual2 { v: self.v - o.v, d: self.d - o.d, dd: self.dd - o.dd }
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 { v: -self.v, d: -self.d, dd: -self.dd }
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, o: Dual2) -> Dual2 {
        Dual2 {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    fn div(self, o: Dual2) -> Dual2 {
        let inv = o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Sech,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sech" => Func::Sech,
            _ => return None,
        })
    }

    fn apply(self, a: Dual2) -> Dual2 {
        let x = a.v;
        match self {
            Func::Sin => a.chain(dmath::sin(x), dmath::cos(x), -dmath::sin(x)),
            Func::Cos => a.chain(dmath::cos(x), -dmath::sin(x), -dmath::cos(x)),
            Func::Tan => {
                let t = dmath::tan(x);
                let s = 1.0 + t * t;
                a.chain(t, s, 2.0 * t * s)
            }
            Func::Exp => {
                let e = dmath::exp(x);
                a.chain(e, e, e)
            }
            Func::Ln => a.chain(dmath::ln(x), 1.0 / x, -1.0 / (x * x)),
            Func::Sqrt => {
                let r = x.sqrt();
                a.chain(r, 0.5 / r, -0.25 / (r * x))
            }
            Func::Sinh => a.chain(dmath::sinh(x), dmath::cosh(x), dmath::sinh(x)),
            Func::Cosh => a.chain(dmath::cosh(x), dmath::sinh(x), dmath::cosh(x)),
            Func::Tanh => {
                let t = dmath::tanh(x);
                let s = 1.0 - t * t;
                a.chain(t, s, -2.0 * t * s)
            }
            Func::Sech => {
                let s = 1.0 / dmath::cosh(x);
                let t = dmath::tanh(x);
                a.chain(s, -s * t, s * (2.0 * t * t - 1.0))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn has_var(&self) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Call(_, a) => a.has_var(),
            Node::Bin(_, a, b) => a.has_var() || b.has_var(),
        }
    }

    fn eval(&self, x: Dual2) -> Dual2 {
        match self {
            Node::Num(v) => Dual2::constant(*v),
            Node::Var => x,
            Node::Neg(a) => -a.eval(x),
            Node::Call(f, a) => f.apply(a.eval(x)),
            Node::Bin(op, a, b) => {
                let l = a.eval(x);
                match op {
                    '+' => l + b.eval(x),
                    '-' => l - b.eval(x),
                    '*' => l * b.eval(x),
                    '/' => l / b.eval(x),
                    '^' => match b.as_ref() {
                        Node::Num(p) => l.powf(*p),
                        other => {
                            let e = other.eval(x);
                            Func::Exp.apply(e * Func::Ln.apply(l))
                        }
                    },
                    _ => unreachable!("parser only emits + - * / ^"),
                }
            }
        }
    }
}

/// Parsed expression in the single variable `x` (also accepted: `t`).
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str) -> QsResult<Expr> {
        let mut p = Parser { chars: src.chars().collect(), pos: 0 };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(Expr { source: src.to_string(), root })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.root.eval(Dual2::constant(x)).v
    }

    /// Value, first and second derivative at `x`.
    pub fn eval2(&self, x: f64) -> Dual2 {
        self.root.eval(Dual2::variable(x))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> QsError {
        let src: String = self.chars.iter().collect();
        QsError::ConfigInvalid(format!("expression '{src}' at column {}: {msg}", self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> QsResult<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> QsResult<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> QsResult<Node> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // Exponentiation binds tighter than unary minus and is right-associative.
    fn power(&mut self) -> QsResult<Node> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let mut exp = self.unary()?;
            if !exp.has_var() {
                exp = Node::Num(exp.eval(Dual2::constant(0.0)).v);
            }
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> QsResult<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "x" | "t" => Ok(Node::Var),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => {
                        let f = Func::lookup(&name).ok_or_else(|| self.err(&format!("unknown name '{name}'")))?;
                        if self.peek() != Some('(') {
                            return Err(self.err("expected '(' after function name"));
                        }
                        let arg = self.atom()?;
                        Ok(Node::Call(f, Box::new(arg)))
                    }
                }
            }
            _ => Err(self.err("expected number, variable, function or '('")),
        }
    }

    fn number(&mut self) -> QsResult<Node> {
        let start = self.pos;
        let n = self.chars.len();
        while self.pos < n && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.') {
            self.pos += 1;
        }
        if self.pos < n && (self.chars[self.pos] == 'e' || self.chars[self.pos] == 'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < n && (self.chars[self.pos] == '+' || self.chars[self.pos] == '-') {
                self.pos += 1;
            }
            if self.pos < n && self.chars[self.pos].is_ascii_digit() {
                while self.pos < n && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<f64>().map(Node::Num).map_err(|_| self.err("malformed number"))
    }
}
