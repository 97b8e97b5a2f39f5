//! Recursive-descent parser for the expression DSL.
//!
//! Grammar (ASCII):
//!   expr    := term (('+'|'-') term)*
//!   term    := factor (('*'|'/') factor)*
//!   factor  := '-' factor | power
//!   power   := primary ('^' pexp)?
//!   pexp    := '-'? (INT | '(' expr ')')
//!   primary := INT | '(' expr ')' | 'exp' '(' expr ')' | 'ln' '(' expr ')'
//!            | 'd' '(' IDENT ',' INT {',' INT} ')' '(' args ')'
//!            | IDENT '[' IDENT {',' IDENT} ']' | IDENT '(' args ')' | IDENT
//!
//! Jet variables list independent-variable names, order irrelevant:
//! `u[x,x,t]`. `d(h,1)(expr)` is the first derivative of the function symbol
//! h evaluated at expr; with several arguments the orders are per argument,
//! `d(f,1,0)(t,x)`. Exponents must be rational constants.

use std::collections::BTreeMap;

use num::BigRational;

use crate::atom::Atom;
use crate::context::{Context, FuncId, NameKind};
use crate::error::{ExprError, ParseError};
use crate::expr::Expr;
use crate::multi_index::MultiIndex;

/// Expansion for bare function-symbol names (`phi2` meaning `phi2(t)`), used
/// by scenario files for reduced functions.
pub type FuncSugar = BTreeMap<FuncId, Vec<Expr>>;

pub fn parse(ctx: &Context, text: &str) -> Result<Expr, ParseError> {
    parse_with_sugar(ctx, text, &FuncSugar::new())
}

pub fn parse_with_sugar(
    ctx: &Context,
    text: &str,
    sugar: &FuncSugar,
) -> Result<Expr, ParseError> {
    let mut p = Parser { ctx, text: text.as_bytes(), pos: 0, sugar };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    ctx: &'a Context,
    text: &'a [u8],
    pos: usize,
    sugar: &'a FuncSugar,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, msg)
    }

    fn lift(&self, e: ExprError) -> ParseError {
        ParseError::new(self.pos, e.to_string())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {}
            _ => return Err(self.err("expected identifier")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .expect("ascii idents")
            .to_string())
    }

    fn integer(&mut self) -> Result<num::BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| self.err("integer literal out of range"))
    }

    fn small_integer(&mut self) -> Result<u32, ParseError> {
        let n = self.integer()?;
        num::ToPrimitive::to_u32(&n).ok_or_else(|| self.err("derivative order too large"))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::add(self.ctx, &acc, &rhs).map_err(|e| self.lift(e))?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = Expr::sub(self.ctx, &acc, &rhs).map_err(|e| self.lift(e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = Expr::mul(self.ctx, &acc, &rhs).map_err(|e| self.lift(e))?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = Expr::div(self.ctx, &acc, &rhs).map_err(|e| self.lift(e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(inner.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.exponent()?;
            return base.pow_rational(self.ctx, &e).map_err(|e| self.lift(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let value = if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            e.as_rational()
                .cloned()
                .ok_or_else(|| self.err("exponent must be a rational constant"))?
        } else {
            BigRational::from_integer(self.integer()?)
        };
        Ok(if neg { -value } else { value })
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                Ok(Expr::from_rational(BigRational::from_integer(self.integer()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let at = self.pos;
                let name = self.ident()?;
                match name.as_str() {
                    "exp" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Expr::exp(self.ctx, &arg).map_err(|e| self.lift(e))
                    }
                    "ln" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Expr::ln(self.ctx, &arg).map_err(|e| self.lift(e))
                    }
                    "d" => self.func_derivative(),
                    _ => self.named(at, name),
                }
            }
            _ => Err(self.err("expected expression")),
        }
    }

    /// `d(name, k1[, k2...])(args)`
    fn func_derivative(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let at = self.pos;
        let name = self.ident()?;
        let id = match self.ctx.lookup(&name) {
            Some(NameKind::Func(id)) => id,
            Some(_) => {
                self.pos = at;
                return Err(self.err(format!("`{name}` is not a function symbol")));
            }
            None => {
                self.pos = at;
                return Err(self.err(format!("undeclared identifier `{name}`")));
            }
        };
        let mut orders = Vec::new();
        while self.eat(b',') {
            orders.push(self.small_integer()?);
        }
        self.expect(b')')?;
        let arity = self.ctx.func(id).arity;
        if orders.len() != arity {
            return Err(self.err(format!(
                "`{name}` takes {arity} argument(s), got {} derivative order(s)",
                orders.len()
            )));
        }
        let args = self.args()?;
        if args.len() != arity {
            return Err(self.err(format!(
                "`{name}` takes {arity} argument(s), got {}",
                args.len()
            )));
        }
        Expr::func(self.ctx, id, orders, args).map_err(|e| self.lift(e))
    }

    fn named(&mut self, at: usize, name: String) -> Result<Expr, ParseError> {
        let kind = match self.ctx.lookup(&name) {
            Some(k) => k,
            None => {
                self.pos = at;
                return Err(self.err(format!("undeclared identifier `{name}`")));
            }
        };
        match kind {
            NameKind::Indep(v) => Ok(Expr::indep(self.ctx, v)),
            NameKind::Param(p) => Ok(Expr::param(p)),
            NameKind::Def(d) => Expr::defined(self.ctx, d).map_err(|e| self.lift(e)),
            NameKind::Dep(dep) => {
                self.skip_ws();
                if self.peek() == Some(b'[') {
                    self.pos += 1;
                    let mut index = MultiIndex::zero(self.ctx.indep_count());
                    loop {
                        let vat = self.pos;
                        self.skip_ws();
                        let vname = self.ident()?;
                        match self.ctx.lookup(&vname) {
                            Some(NameKind::Indep(v)) => index = index.bump(v.index()),
                            _ => {
                                self.pos = vat;
                                return Err(self.err(format!(
                                    "`{vname}` is not an independent variable"
                                )));
                            }
                        }
                        if !self.eat(b',') {
                            break;
                        }
                    }
                    self.expect(b']')?;
                    Ok(Expr::jet(dep, index))
                } else {
                    Ok(Expr::jet(dep, MultiIndex::zero(self.ctx.indep_count())))
                }
            }
            NameKind::Func(id) => {
                self.skip_ws();
                if self.peek() == Some(b'(') {
                    let args = self.args()?;
                    let arity = self.ctx.func(id).arity;
                    if args.len() != arity {
                        self.pos = at;
                        return Err(self.err(format!(
                            "`{name}` takes {arity} argument(s), got {}",
                            args.len()
                        )));
                    }
                    let orders = vec![0; args.len()];
                    Expr::func(self.ctx, id, orders, args).map_err(|e| self.lift(e))
                } else if let Some(default_args) = self.sugar.get(&id) {
                    let orders = vec![0; default_args.len()];
                    Expr::func(self.ctx, id, orders, default_args.clone())
                        .map_err(|e| self.lift(e))
                } else {
                    self.pos = at;
                    Err(self.err(format!("function symbol `{name}` requires arguments")))
                }
            }
        }
    }
}

/// Parse a jet-variable reference such as `u[x,x]` or `u`, returning the atom.
pub fn parse_jet_ref(ctx: &Context, text: &str) -> Result<Atom, ParseError> {
    let e = parse(ctx, text)?;
    e.as_atom()
        .filter(|a| matches!(a, Atom::Jet { .. }))
        .cloned()
        .ok_or_else(|| ParseError::new(0, "expected a jet variable reference"))
}
