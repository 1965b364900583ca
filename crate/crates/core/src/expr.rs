//! A small expression language for functions of position.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x1' | 'x2' | 'x3' | 'e' | 'pi'
//!         | func '(' expr ')' | 'norm2' '(' 'x' ')' | '(' expr ')'
//! func   := 'abs' | 'exp' | 'log' | 'sqrt'
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so
//! `-x1^2` is `-(x1^2)` and `2^3^2` is `2^9`.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based coordinate index; `x1` is `Var(0)`.
    Var(usize),
    /// Euclidean norm of the evaluation point.
    Norm2,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        p.skip_ws();
        if p.pos == p.src.len() {
            return Err(Error::Syntax { offset: p.pos, message: "empty expression" });
        }
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Syntax { offset: p.pos, message: "unexpected character" });
        }
        Ok(e)
    }

    /// Largest coordinate index used, one-based (0 if none).
    pub fn max_variable(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Norm2 => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.max_variable(),
            Expr::Binary(_, a, b) => a.max_variable().max(b.max_variable()),
        }
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *point
                .get(*i)
                .ok_or(Error::VariableOutOfRange { index: i + 1, dim: point.len() })?,
            Expr::Norm2 => math::sqrt(point.iter().map(|x| x * x).sum()),
            Expr::Neg(a) => -a.evaluate(point)?,
            Expr::Call(f, a) => {
                let x = a.evaluate(point)?;
                match f {
                    Func::Abs => math::abs(x),
                    Func::Exp => math::exp(x),
                    Func::Log if x < 0.0 => {
                        return Err(Error::EvaluationDomain("log of a negative number"))
                    }
                    Func::Log => math::ln(x),
                    Func::Sqrt if x < 0.0 => {
                        return Err(Error::EvaluationDomain("sqrt of a negative number"))
                    }
                    Func::Sqrt => math::sqrt(x),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.evaluate(point)?;
                let y = b.evaluate(point)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => {
                        if x < 0.0 && math::floor(y) != y {
                            return Err(Error::EvaluationDomain(
                                "non-integer power of a negative number",
                            ));
                        }
                        math::pow(x, y)
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteResult)
        }
    }

    /// Evaluates at every cell center of `domain`.
    pub fn sample(&self, domain: &Domain) -> Result<GridFunction> {
        let dim = domain.dim();
        let mut values = Vec::with_capacity(domain.len());
        for cell in 0..domain.len() {
            let c = domain.center(cell);
            let v = self
                .evaluate(&c[..dim])
                .map_err(|e| Error::Sample { cell, source: Box::new(e) })?;
            values.push(v);
        }
        GridFunction::new(*domain, values)
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; parsing the output gives back the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Norm2 => f.write_str("norm2(x)"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Abs => "abs",
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sqrt => "sqrt",
                };
                write!(f, "{name}({a})")
            }
            Expr::Binary(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
        }
    }
}

impl core::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8, message: &'static str) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax { offset: self.pos, message })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', "expected ')'")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(Error::Syntax { offset: self.pos, message: "unexpected character" }),
            None => Err(Error::Syntax { offset: start.max(self.pos), message: "unexpected end of input" }),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                digits(self);
            } else {
                // `2e` is `2 e`-style garbage, not an exponent
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Const(v)),
            Ok(_) => Err(Error::Syntax { offset: start, message: "number out of range" }),
            Err(_) => Err(Error::Syntax { offset: start, message: "malformed number" }),
        }
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let func = match name {
            "x1" => return Ok(Expr::Var(0)),
            "x2" => return Ok(Expr::Var(1)),
            "x3" => return Ok(Expr::Var(2)),
            "e" => return Ok(Expr::Const(math::E)),
            "pi" => return Ok(Expr::Const(core::f64::consts::PI)),
            "norm2" => {
                self.expect(b'(', "expected '(' after function name")?;
                if self.peek() != Some(b'x') {
                    return Err(Error::Syntax { offset: self.pos, message: "norm2 takes the argument x" });
                }
                self.pos += 1;
                if self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                    return Err(Error::Syntax { offset: self.pos - 1, message: "norm2 takes the argument x" });
                }
                self.expect(b')', "expected ')'")?;
                return Ok(Expr::Norm2);
            }
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => {
                return Err(Error::UnknownIdentifier { offset: start, name: name.to_string() })
            }
        };
        self.expect(b'(', "expected '(' after function name")?;
        let arg = self.expr()?;
        self.expect(b')', "expected ')'")?;
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
