//! Double-precision evaluation of expressions. The symbolic layer is exact;
//! floats only appear here and in the numeric verification crate.

use std::collections::HashMap;

use num::ToPrimitive;

use crate::atom::Atom;
use crate::context::{Context, DefId, DepId, FuncId, ParamId, VarId};
use crate::error::EvalError;
use crate::expr::Expr;
use crate::multi_index::MultiIndex;
use crate::poly::Poly;

/// Numeric bindings for atoms. Function symbols are resolved through a
/// callback so scenarios can install closures with derivatives.
pub trait EvalEnv {
    fn indep(&self, v: VarId) -> Option<f64>;
    fn param(&self, p: ParamId) -> Option<f64>;
    fn jet(&self, dep: DepId, index: &MultiIndex) -> Option<f64>;
    fn func(&self, id: FuncId, dorders: &[u32], args: &[f64]) -> Result<f64, EvalError>;
    /// Direct value for a defined atom; when absent the atom is evaluated
    /// through its relation as the principal root.
    fn defined(&self, id: DefId) -> Option<f64> {
        let _ = id;
        None
    }
}

/// A simple map-backed environment, enough for tests and spot checks.
#[derive(Debug, Clone, Default)]
pub struct MapEnv {
    pub indeps: HashMap<u32, f64>,
    pub params: HashMap<u32, f64>,
    pub jets: HashMap<(u32, Vec<u32>), f64>,
    pub defined: HashMap<u32, f64>,
    /// Polynomial stand-ins for function symbols: value of the k-th
    /// derivative of sum(c_i z^i) in the first argument; other argument
    /// slots are treated as frozen (orders on them must be zero).
    pub poly_funcs: HashMap<u32, Vec<f64>>,
}

impl EvalEnv for MapEnv {
    fn indep(&self, v: VarId) -> Option<f64> {
        self.indeps.get(&v.0).copied()
    }

    fn param(&self, p: ParamId) -> Option<f64> {
        self.params.get(&p.0).copied()
    }

    fn jet(&self, dep: DepId, index: &MultiIndex) -> Option<f64> {
        self.jets.get(&(dep.0, index.counts().to_vec())).copied()
    }

    fn func(&self, id: FuncId, dorders: &[u32], args: &[f64]) -> Result<f64, EvalError> {
        let coeffs = self
            .poly_funcs
            .get(&id.0)
            .ok_or_else(|| EvalError::MissingValue(format!("function #{}", id.0)))?;
        let k = dorders.first().copied().unwrap_or(0) as usize;
        if dorders.iter().skip(1).any(|&d| d != 0) {
            return Err(EvalError::MissingValue(
                "polynomial stand-ins are univariate".into(),
            ));
        }
        let z = args.first().copied().unwrap_or(0.0);
        Ok(poly_derivative_value(coeffs, k, z))
    }

    fn defined(&self, id: DefId) -> Option<f64> {
        self.defined.get(&id.0).copied()
    }
}

/// Value of the k-th derivative of sum(c_i z^i) at z.
pub fn poly_derivative_value(coeffs: &[f64], k: usize, z: f64) -> f64 {
    let mut total = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if i < k {
            continue;
        }
        let mut factor = 1.0;
        for j in 0..k {
            factor *= (i - j) as f64;
        }
        total += c * factor * z.powi((i - k) as i32);
    }
    total
}

impl Expr {
    pub fn eval(&self, ctx: &Context, env: &dyn EvalEnv) -> Result<f64, EvalError> {
        let n = eval_poly(ctx, self.numerator(), env)?;
        let d = eval_poly(ctx, self.denominator(), env)?;
        if d == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let v = n / d;
        if !v.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }
}

fn eval_poly(ctx: &Context, p: &Poly, env: &dyn EvalEnv) -> Result<f64, EvalError> {
    let mut total = 0.0;
    for (m, c) in p.terms() {
        let mut v = c.to_f64().ok_or(EvalError::NonFinite)?;
        for (a, e) in m.factors() {
            v *= eval_atom(ctx, a, env)?.powi(*e as i32);
        }
        total += v;
    }
    Ok(total)
}

fn eval_atom(ctx: &Context, a: &Atom, env: &dyn EvalEnv) -> Result<f64, EvalError> {
    match a {
        Atom::Indep(v) => env
            .indep(*v)
            .ok_or_else(|| EvalError::MissingValue(ctx.indep_name(*v).to_string())),
        Atom::Param(p) => env
            .param(*p)
            .ok_or_else(|| EvalError::MissingValue(ctx.param_name(*p).to_string())),
        Atom::Jet { dep, index } => env.jet(*dep, index).ok_or_else(|| {
            EvalError::MissingValue(format!("{}{}", ctx.dep_name(*dep), index))
        }),
        Atom::Func { id, dorders, args } => {
            let mut vals = Vec::with_capacity(args.len());
            for arg in args {
                vals.push(arg.eval(ctx, env)?);
            }
            env.func(*id, dorders, &vals)
        }
        Atom::Exp(arg) => Ok(arg.eval(ctx, env)?.exp()),
        Atom::Ln(arg) => {
            let v = arg.eval(ctx, env)?;
            if v <= 0.0 {
                return Err(EvalError::LnDomain(v));
            }
            Ok(v.ln())
        }
        Atom::Root { base, degree } => {
            let v = eval_atom(ctx, base, env)?;
            nth_root(v, *degree)
        }
        Atom::Def(id) => {
            if let Some(v) = env.defined(*id) {
                return Ok(v);
            }
            let rel = ctx
                .relation(*id)
                .ok_or_else(|| EvalError::NoAtomValue(ctx.defined(*id).name.clone()))?;
            let rhs = rel.rhs.eval(ctx, env)?;
            nth_root(rhs, rel.degree)
        }
    }
}

/// Principal real q-th root; errors on even roots of negative values.
fn nth_root(v: f64, degree: u32) -> Result<f64, EvalError> {
    if degree == 1 {
        return Ok(v);
    }
    if v < 0.0 {
        if degree % 2 == 0 {
            return Err(EvalError::RootDomain(v));
        }
        return Ok(-(-v).powf(1.0 / degree as f64));
    }
    Ok(v.powf(1.0 / degree as f64))
}
