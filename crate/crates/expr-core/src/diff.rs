//! Atom-level partial differentiation and simultaneous substitution.

use num::BigRational;

use crate::atom::Atom;
use crate::context::{Context, DepId};
use crate::error::ExprError;
use crate::expr::{Bindings, Expr};
use crate::poly::Poly;

impl Expr {
    /// Partial derivative with respect to `target`, treating all atoms as
    /// independent coordinates. Chain rules descend into exp, ln, roots and
    /// function-symbol arguments (raising the corresponding derivative
    /// order); defined atoms are formal coordinates.
    pub fn diff_atom(&self, ctx: &Context, target: &Atom) -> Result<Expr, ExprError> {
        let dn = diff_poly(ctx, &self.numerator(), target)?;
        let dd = diff_poly(ctx, &self.denominator(), target)?;
        // (n/d)' = (n' d - n d') / d^2
        let num_expr = Expr::make(ctx, self.numerator().clone(), Poly::one())?;
        let den_expr = Expr::make(ctx, self.denominator().clone(), Poly::one())?;
        let t1 = Expr::mul(ctx, &dn, &den_expr)?;
        let t2 = Expr::mul(ctx, &num_expr, &dd)?;
        let upper = Expr::sub(ctx, &t1, &t2)?;
        let lower = Expr::mul(ctx, &den_expr, &den_expr)?;
        Expr::div(ctx, &upper, &lower)
    }

    /// Simultaneous substitution of atoms by expressions, followed by
    /// normalization. Compound atoms (function applications, exp, ln, roots)
    /// are rebuilt with substituted arguments unless bound directly.
    ///
    /// When `total_deps` lists a dependent variable, every jet of it must be
    /// bound; an unbound jet is an error. This is the mode used to evaluate
    /// an expression on a solution.
    pub fn substitute(
        &self,
        ctx: &Context,
        bindings: &Bindings,
        total_deps: &[DepId],
    ) -> Result<Expr, ExprError> {
        let n = subst_poly(ctx, self.numerator(), bindings, total_deps)?;
        let d = subst_poly(ctx, self.denominator(), bindings, total_deps)?;
        Expr::div(ctx, &n, &d)
    }
}

fn diff_poly(ctx: &Context, p: &Poly, target: &Atom) -> Result<Expr, ExprError> {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        for (i, (a, e)) in m.factors().iter().enumerate() {
            let da = diff_atom_node(ctx, a, target)?;
            if da.is_zero() {
                continue;
            }
            // c * e * a^(e-1) * da * (other factors)
            let mut rest = Poly::constant(c * BigRational::from_integer((*e).into()));
            for (j, (b, be)) in m.factors().iter().enumerate() {
                let pow = if i == j { *e - 1 } else { *be };
                if pow > 0 {
                    rest = rest.mul(&Poly::term(
                        crate::poly::Mono::atom_pow(b.clone(), pow),
                        BigRational::from_integer(1.into()),
                    ));
                }
            }
            let rest = Expr::make(ctx, rest, Poly::one())?;
            let term = Expr::mul(ctx, &rest, &da)?;
            acc = Expr::add(ctx, &acc, &term)?;
        }
    }
    Ok(acc)
}

/// Derivative of a single atom with respect to `target`.
fn diff_atom_node(ctx: &Context, a: &Atom, target: &Atom) -> Result<Expr, ExprError> {
    if a == target {
        return Ok(Expr::one());
    }
    match a {
        Atom::Indep(_) | Atom::Param(_) | Atom::Jet { .. } | Atom::Def(_) => Ok(Expr::zero()),
        Atom::Func { id, dorders, args } => {
            let mut acc = Expr::zero();
            for (i, arg) in args.iter().enumerate() {
                let darg = arg.diff_atom(ctx, target)?;
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
            let darg = arg.diff_atom(ctx, target)?;
            if darg.is_zero() {
                return Ok(Expr::zero());
            }
            let e = Expr::exp(ctx, arg)?;
            Expr::mul(ctx, &e, &darg)
        }
        Atom::Ln(arg) => {
            let darg = arg.diff_atom(ctx, target)?;
            if darg.is_zero() {
                return Ok(Expr::zero());
            }
            Expr::div(ctx, &darg, arg)
        }
        Atom::Root { base, degree } => {
            let dbase = diff_atom_node(ctx, base, target)?;
            if dbase.is_zero() {
                return Ok(Expr::zero());
            }
            // d(base^(1/q)) = dbase / (q * root^(q-1))
            let root = Expr::from_atom(ctx, a.clone())?;
            let denom = root
                .pow_int(ctx, (*degree as i64) - 1)?
                .scale(&BigRational::from_integer((*degree).into()));
            Expr::div(ctx, &dbase, &denom)
        }
    }
}

fn subst_poly(
    ctx: &Context,
    p: &Poly,
    bindings: &Bindings,
    total_deps: &[DepId],
) -> Result<Expr, ExprError> {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::from_rational(c.clone());
        for (a, e) in m.factors() {
            let img = subst_atom(ctx, a, bindings, total_deps)?;
            term = Expr::mul(ctx, &term, &img.pow_int(ctx, *e as i64)?)?;
        }
        acc = Expr::add(ctx, &acc, &term)?;
    }
    Ok(acc)
}

fn subst_atom(
    ctx: &Context,
    a: &Atom,
    bindings: &Bindings,
    total_deps: &[DepId],
) -> Result<Expr, ExprError> {
    if let Some(img) = bindings.get(a) {
        return Ok(img.clone());
    }
    match a {
        Atom::Jet { dep, .. } if total_deps.contains(dep) => {
            Err(ExprError::MissingJetBinding(format!(
                "{}{}",
                ctx.dep_name(*dep),
                match a {
                    Atom::Jet { index, .. } => format!("{index}"),
                    _ => unreachable!(),
                }
            )))
        }
        Atom::Func { id, dorders, args } => {
            let new_args = args
                .iter()
                .map(|arg| arg.substitute(ctx, bindings, total_deps))
                .collect::<Result<Vec<_>, _>>()?;
            if new_args == *args {
                Expr::from_atom(ctx, a.clone())
            } else {
                Expr::func(ctx, *id, dorders.clone(), new_args)
            }
        }
        Atom::Exp(arg) => {
            let new = arg.substitute(ctx, bindings, total_deps)?;
            if new == **arg {
                Expr::from_atom(ctx, a.clone())
            } else {
                Expr::exp(ctx, &new)
            }
        }
        Atom::Ln(arg) => {
            let new = arg.substitute(ctx, bindings, total_deps)?;
            if new == **arg {
                Expr::from_atom(ctx, a.clone())
            } else {
                Expr::ln(ctx, &new)
            }
        }
        Atom::Root { base, degree } => {
            let new_base = subst_atom(ctx, base, bindings, total_deps)?;
            if new_base.as_atom() == Some(base) {
                Expr::from_atom(ctx, a.clone())
            } else {
                new_base.pow_rational(
                    ctx,
                    &BigRational::new(1.into(), (*degree).into()),
                )
            }
        }
        _ => Expr::from_atom(ctx, a.clone()),
    }
}
