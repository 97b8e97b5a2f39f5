//! Total derivatives D_v on jet expressions.

use expr_core::{Atom, BigRational, Context, Expr, MultiIndex, Poly, VarId};

use crate::error::JetError;

/// Total derivative along the independent variable `v`: jets shift their
/// multi-index, function applications and exp/ln follow the chain rule,
/// defined atoms use their declared rules, parameters are constants.
pub fn total_derivative(ctx: &Context, e: &Expr, v: VarId) -> Result<Expr, JetError> {
    let n = e.numerator();
    let d = e.denominator();
    let dn = d_poly(ctx, n, v)?;
    if d.is_one() {
        return Ok(dn);
    }
    let dd = d_poly(ctx, d, v)?;
    let n_expr = Expr::from_poly(ctx, n)?;
    let d_expr = Expr::from_poly(ctx, d)?;
    // (n/d)' = (n' d - n d')/d^2
    let upper = Expr::sub(
        ctx,
        &Expr::mul(ctx, &dn, &d_expr)?,
        &Expr::mul(ctx, &n_expr, &dd)?,
    )?;
    let lower = Expr::mul(ctx, &d_expr, &d_expr)?;
    Ok(Expr::div(ctx, &upper, &lower)?)
}

/// Repeated total derivative per a multi-index.
pub fn total_derivative_multi(
    ctx: &Context,
    e: &Expr,
    index: &MultiIndex,
) -> Result<Expr, JetError> {
    let mut out = e.clone();
    for (slot, count) in index.counts().iter().enumerate() {
        for _ in 0..*count {
            out = total_derivative(ctx, &out, VarId(slot as u32))?;
        }
    }
    Ok(out)
}

fn d_poly(ctx: &Context, p: &Poly, v: VarId) -> Result<Expr, JetError> {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        for (i, (a, e)) in m.factors().iter().enumerate() {
            let da = d_atom(ctx, a, v)?;
            if da.is_zero() {
                continue;
            }
            let mut rest = Expr::from_rational(c * BigRational::from_integer((*e).into()));
            for (j, (b, be)) in m.factors().iter().enumerate() {
                let pow = if i == j { *be - 1 } else { *be };
                if pow > 0 {
                    let factor = Expr::from_atom(ctx, b.clone())?.pow_int(ctx, pow as i64)?;
                    rest = Expr::mul(ctx, &rest, &factor)?;
                }
            }
            acc = Expr::add(ctx, &acc, &Expr::mul(ctx, &rest, &da)?)?;
        }
    }
    Ok(acc)
}

fn d_atom(ctx: &Context, a: &Atom, v: VarId) -> Result<Expr, JetError> {
    match a {
        Atom::Indep(w) => Ok(if *w == v { Expr::one() } else { Expr::zero() }),
        Atom::Param(_) => Ok(Expr::zero()),
        Atom::Jet { dep, index } => Ok(Expr::jet(*dep, index.bump(v.index()))),
        Atom::Func { id, dorders, args } => {
            let mut acc = Expr::zero();
            for (i, arg) in args.iter().enumerate() {
                let darg = total_derivative(ctx, arg, v)?;
                if darg.is_zero() {
                    continue;
                }
                let mut next = dorders.clone();
                next[i] += 1;
                let fd = Expr::func(ctx, *id, next, args.clone())?;
                acc = Expr::add(ctx, &acc, &Expr::mul(ctx, &fd, &darg)?)?;
            }
            Ok(acc)
        }
        Atom::Exp(arg) => {
            let darg = total_derivative(ctx, arg, v)?;
            if darg.is_zero() {
                return Ok(Expr::zero());
            }
            let e = Expr::exp(ctx, arg)?;
            Ok(Expr::mul(ctx, &e, &darg)?)
        }
        Atom::Ln(arg) => {
            let darg = total_derivative(ctx, arg, v)?;
            if darg.is_zero() {
                return Ok(Expr::zero());
            }
            Ok(Expr::div(ctx, &darg, arg)?)
        }
        Atom::Root { base, degree } => {
            let dbase = d_atom(ctx, base, v)?;
            if dbase.is_zero() {
                return Ok(Expr::zero());
            }
            let root = Expr::from_atom(ctx, a.clone())?;
            let denom = root
                .pow_int(ctx, (*degree as i64) - 1)?
                .scale(&BigRational::from_integer((*degree).into()));
            Ok(Expr::div(ctx, &dbase, &denom)?)
        }
        Atom::Def(id) => match ctx.drule(*id, v) {
            Some(rule) => Ok(rule.clone()),
            None => Err(JetError::MissingDerivativeRule {
                atom: ctx.defined(*id).name.clone(),
                var: ctx.indep_name(v).to_string(),
            }),
        },
    }
}

/// Check the declared derivative rules of every defined atom against its
/// relation: D_v(atom^d - rhs) must reduce to zero for each variable that
/// has a rule. Run this after building a context with defined atoms.
pub fn validate_context(ctx: &Context) -> Result<(), JetError> {
    for i in 0..ctx.defined_count() {
        let id = expr_core::DefId(i as u32);
        let Some(rel) = ctx.relation(id) else { continue };
        let atom_expr = Expr::defined(ctx, id)?;
        let lhs = atom_expr.pow_int(ctx, rel.degree as i64)?;
        let residual = Expr::sub(ctx, &lhs, &rel.rhs)?;
        debug_assert!(residual.is_zero(), "relation rewrites apply to the atom itself");
        // d * atom^(d-1) * drule(v) - D_v(rhs) = 0
        for slot in 0..ctx.indep_count() {
            let v = VarId(slot as u32);
            if ctx.drule(id, v).is_none() {
                continue;
            }
            let rule = ctx.drule(id, v).unwrap().clone();
            let lead = atom_expr
                .pow_int(ctx, rel.degree as i64 - 1)?
                .scale(&BigRational::from_integer(rel.degree.into()));
            let lhs_d = Expr::mul(ctx, &lead, &rule)?;
            let rhs_d = total_derivative(ctx, &rel.rhs, v)?;
            let diff = Expr::sub(ctx, &lhs_d, &rhs_d)?;
            if !diff.is_zero() {
                return Err(JetError::NotSolvedForm {
                    lead: ctx.defined(id).name.clone(),
                    why: format!(
                        "derivative rule for {} is inconsistent with the relation",
                        ctx.indep_name(v)
                    ),
                });
            }
        }
    }
    Ok(())
}
