//! Expression trees over the tower generators.
//!
//! Grammar: generators `x1..xn`, `u[c1,c2,...]` (entries are field-element
//! strings), the constant `t`, integer literals, `+ - * / ^` (with a
//! non-negative integer exponent) and the functions `wp()`, `g()`, `h()`.
//!
//! An expression can be turned into a normalized [`SymbolicElement`] or
//! evaluated numerically at a point using plain field arithmetic; the two
//! paths share nothing but the tree.

use std::fmt;
use std::ops;

use thiserror::Error;

use crate::field::FieldCtx;
use crate::kernel::{KernelError, RelationSystem, SymbolicElement};
use crate::tower::GeneratorId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Gen(GeneratorId),
    Const(u32),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Wp(Box<Expr>),
    G(Box<Expr>),
    H(Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("pole: {0} vanishes at the point")]
    Pole(String),
    #[error("no value for generator {0}")]
    Missing(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl Expr {
    pub fn gen(id: GeneratorId) -> Expr {
        Expr::Gen(id)
    }

    pub fn x(i: usize) -> Expr {
        Expr::Gen(GeneratorId::X(i))
    }

    pub fn u(c: &[u32]) -> Expr {
        Expr::Gen(GeneratorId::U(c.to_vec()))
    }

    pub fn c(raw: u32) -> Expr {
        Expr::Const(raw)
    }

    pub fn pow(self, e: u32) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn wp(self) -> Expr {
        Expr::Wp(Box::new(self))
    }

    pub fn g(self) -> Expr {
        Expr::G(Box::new(self))
    }

    pub fn h(self) -> Expr {
        Expr::H(Box::new(self))
    }

    pub fn to_symbolic(&self, rs: &RelationSystem) -> Result<SymbolicElement, KernelError> {
        Ok(match self {
            Expr::Gen(id) => rs.var(id)?,
            Expr::Const(c) => rs.constant_raw(*c),
            Expr::Add(a, b) => rs.add(&a.to_symbolic(rs)?, &b.to_symbolic(rs)?),
            Expr::Sub(a, b) => rs.sub(&a.to_symbolic(rs)?, &b.to_symbolic(rs)?),
            Expr::Mul(a, b) => rs.mul(&a.to_symbolic(rs)?, &b.to_symbolic(rs)?),
            Expr::Div(a, b) => rs.div(&a.to_symbolic(rs)?, &b.to_symbolic(rs)?)?,
            Expr::Neg(a) => rs.neg(&a.to_symbolic(rs)?),
            Expr::Pow(a, e) => rs.pow(&a.to_symbolic(rs)?, *e),
            Expr::Wp(a) => rs.wp_apply(&a.to_symbolic(rs)?),
            Expr::G(a) => rs.g_apply(&a.to_symbolic(rs)?)?,
            Expr::H(a) => rs.h_apply(&a.to_symbolic(rs)?)?,
        })
    }

    /// Numeric value with field arithmetic only.
    pub fn eval(
        &self,
        ctx: &FieldCtx,
        lookup: &dyn Fn(&GeneratorId) -> Option<u32>,
    ) -> Result<u32, EvalError> {
        let p = ctx.characteristic() as u64;
        let div = |n: u32, d: u32, what: &str| -> Result<u32, EvalError> {
            let inv = ctx
                .inv_raw(d)
                .ok_or_else(|| EvalError::Pole(what.to_string()))?;
            Ok(ctx.mul_raw(n, inv))
        };
        Ok(match self {
            Expr::Gen(id) => lookup(id).ok_or_else(|| EvalError::Missing(id.display(ctx)))?,
            Expr::Const(c) => *c,
            Expr::Add(a, b) => ctx.add_raw(a.eval(ctx, lookup)?, b.eval(ctx, lookup)?),
            Expr::Sub(a, b) => ctx.sub_raw(a.eval(ctx, lookup)?, b.eval(ctx, lookup)?),
            Expr::Mul(a, b) => ctx.mul_raw(a.eval(ctx, lookup)?, b.eval(ctx, lookup)?),
            Expr::Div(a, b) => div(a.eval(ctx, lookup)?, b.eval(ctx, lookup)?, "divisor")?,
            Expr::Neg(a) => ctx.neg_raw(a.eval(ctx, lookup)?),
            Expr::Pow(a, e) => ctx.pow_raw(a.eval(ctx, lookup)?, *e as u64),
            Expr::Wp(a) => ctx.wp_raw(a.eval(ctx, lookup)?),
            Expr::G(a) => {
                let y = a.eval(ctx, lookup)?;
                div(ctx.pow_raw(y, p + 1), ctx.wp_raw(y), "x^p + x")?
            }
            Expr::H(a) => {
                let y = ctx.pow_raw(a.eval(ctx, lookup)?, p - 1);
                div(ctx.sub_raw(y, 1), ctx.add_raw(y, 1), "x^(p-1) + 1")?
            }
        })
    }

    pub fn display<'a>(&'a self, ctx: &'a FieldCtx) -> impl fmt::Display + 'a {
        DisplayExpr { e: self, ctx }
    }

    pub fn parse(s: &str, ctx: &FieldCtx) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            ctx,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$v(Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

struct DisplayExpr<'a> {
    e: &'a Expr,
    ctx: &'a FieldCtx,
}

impl<'a> fmt::Display for DisplayExpr<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e: &'a Expr| DisplayExpr { e, ctx: self.ctx };
        match self.e {
            Expr::Gen(id) => f.write_str(&id.display(self.ctx)),
            Expr::Const(c) => write!(f, "({})", self.ctx.format_raw(*c)),
            Expr::Add(a, b) => write!(f, "({} + {})", sub(a), sub(b)),
            Expr::Sub(a, b) => write!(f, "({} - {})", sub(a), sub(b)),
            Expr::Mul(a, b) => write!(f, "{}*{}", sub(a), sub(b)),
            Expr::Div(a, b) => write!(f, "{}/{}", sub(a), sub(b)),
            Expr::Neg(a) => write!(f, "-{}", sub(a)),
            Expr::Pow(a, e) => write!(f, "{}^{}", sub(a), e),
            Expr::Wp(a) => write!(f, "wp({})", sub(a)),
            Expr::G(a) => write!(f, "g({})", sub(a)),
            Expr::H(a) => write!(f, "h({})", sub(a)),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a FieldCtx,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.term()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.unary()?;
            } else if self.eat(b'/') {
                lhs = lhs / self.unary()?;
            } else if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'(') {
                // implicit product such as `2t`
                lhs = lhs * self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.number()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.number()?;
                let p = self.ctx.characteristic() as u64;
                Ok(Expr::Const((v % p) as u32))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match word {
                    "t" => Ok(Expr::Const(self.ctx.parse_raw("t").unwrap())),
                    "wp" | "g" | "h" => {
                        if !self.eat(b'(') {
                            return Err(self.err("expected '(' after function name"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        Ok(match word {
                            "wp" => arg.wp(),
                            "g" => arg.g(),
                            _ => arg.h(),
                        })
                    }
                    "u" => {
                        if self.src.get(self.pos) != Some(&b'[') {
                            return Err(self.err("expected '[' after u"));
                        }
                        let close = self.src[self.pos..]
                            .iter()
                            .position(|&c| c == b']')
                            .ok_or_else(|| self.err("unterminated index vector"))?;
                        let inner = std::str::from_utf8(&self.src[self.pos + 1..self.pos + close]).unwrap();
                        let mut c = Vec::new();
                        for part in inner.split(',') {
                            c.push(
                                self.ctx
                                    .parse_raw(part)
                                    .map_err(|e| self.err(&e.to_string()))?,
                            );
                        }
                        self.pos += close + 1;
                        Ok(Expr::u(&c))
                    }
                    w if w.starts_with('x') => w[1..]
                        .parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1)
                        .map(Expr::x)
                        .ok_or_else(|| self.err("bad generator name")),
                    _ => Err(self.err("unknown identifier")),
                }
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::tower::{gs_tower, closure_tower, ClosureModel};

    #[test]
    fn parse_and_evaluate() {
        let ctx = make_field(3, 2).unwrap();
        let e = Expr::parse("g(x1) - wp(x2)", &ctx).unwrap();
        // x1 = 1, x2 = 1 + t: g(1) = 2, wp(1+t) = 2
        let x2 = ctx.parse_raw("1+t").unwrap();
        let look = |id: &GeneratorId| match id {
            GeneratorId::X(1) => Some(1),
            GeneratorId::X(2) => Some(x2),
            _ => None,
        };
        assert_eq!(e.eval(&ctx, &look).unwrap(), 0);
        let e = Expr::parse("2t*u[t,2*t]^2 / (x1 + 1)", &ctx).unwrap();
        assert!(matches!(e, Expr::Div(..)));
        assert!(Expr::parse("x0", &ctx).is_err());
        assert!(Expr::parse("x1 +", &ctx).is_err());
        assert!(Expr::parse("foo(x1)", &ctx).is_err());
        let pole = Expr::parse("g(t)", &ctx).unwrap();
        assert!(matches!(pole.eval(&ctx, &look), Err(EvalError::Pole(_))));
    }

    #[test]
    fn symbolic_matches_paper_recursion() {
        let spec = gs_tower(3, 3).unwrap();
        let rs = RelationSystem::build(&spec).unwrap();
        let ctx = spec.ctx();
        let lhs = Expr::parse("wp(x2)", ctx).unwrap().to_symbolic(&rs).unwrap();
        let rhs = Expr::parse("x1^4/(x1^3+x1)", ctx).unwrap().to_symbolic(&rs).unwrap();
        assert!(rs.equals(&lhs, &rhs));
    }

    #[test]
    fn closure_aliases() {
        let spec = closure_tower(3, 3, None, ClosureModel::Full).unwrap();
        let rs = RelationSystem::build(&spec).unwrap();
        let ctx = spec.ctx();
        let a = Expr::parse("x3", ctx).unwrap().to_symbolic(&rs).unwrap();
        let b = Expr::parse("u[0]", ctx).unwrap().to_symbolic(&rs).unwrap();
        assert!(rs.equals(&a, &b));
    }
}
