use std::collections::BTreeMap;

use num::{BigRational, One, Signed, Zero};

use crate::atom::Atom;
use crate::context::{Context, DefId, DepId, FuncId};
use crate::error::ExprError;
use crate::multi_index::MultiIndex;
use crate::poly::{Mono, Poly};

/// Budget of whole-expression rewrite passes before normalization gives up.
const REWRITE_BUDGET: u32 = 512;

/// An immutable algebraic expression over jet variables, parameters, function
/// symbols and defined atoms, stored in canonical rational normal form: a
/// single fraction of two multivariate polynomials over the atom set, with
/// defined-atom relations applied, exp products merged, content removed from
/// the denominator, and common polynomial factors cancelled.
///
/// All constructors normalize, so structural equality is semantic equality
/// for rational combinations of atoms plus the declared rewrite relations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

/// Simultaneous-substitution bindings, keyed by atom.
pub type Bindings = BTreeMap<Atom, Expr>;

impl Expr {
    // ----- constructors -----

    pub fn zero() -> Expr {
        Expr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Expr {
        Expr { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Expr {
        Expr::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_rational(q: BigRational) -> Expr {
        Expr { num: Poly::constant(q), den: Poly::one() }
    }

    /// Build from a bare atom, applying its rewrite rules.
    pub fn from_atom(ctx: &Context, a: Atom) -> Result<Expr, ExprError> {
        Expr::make(ctx, Poly::atom(a), Poly::one())
    }

    /// Build from a raw polynomial, applying rewrite rules.
    pub fn from_poly(ctx: &Context, p: &Poly) -> Result<Expr, ExprError> {
        Expr::make(ctx, p.clone(), Poly::one())
    }

    pub fn indep(ctx: &Context, v: crate::context::VarId) -> Expr {
        // plain variables carry no rewrite rules
        let _ = ctx;
        Expr { num: Poly::atom(Atom::Indep(v)), den: Poly::one() }
    }

    pub fn param(p: crate::context::ParamId) -> Expr {
        Expr { num: Poly::atom(Atom::Param(p)), den: Poly::one() }
    }

    pub fn jet(dep: DepId, index: MultiIndex) -> Expr {
        Expr { num: Poly::atom(Atom::Jet { dep, index }), den: Poly::one() }
    }

    /// Function-symbol application with explicit derivative orders.
    pub fn func(
        ctx: &Context,
        id: FuncId,
        dorders: Vec<u32>,
        args: Vec<Expr>,
    ) -> Result<Expr, ExprError> {
        debug_assert_eq!(ctx.func(id).arity, args.len());
        debug_assert_eq!(dorders.len(), args.len());
        Expr::from_atom(ctx, Atom::Func { id, dorders, args })
    }

    pub fn defined(ctx: &Context, id: DefId) -> Result<Expr, ExprError> {
        Expr::from_atom(ctx, Atom::Def(id))
    }

    pub fn exp(ctx: &Context, arg: &Expr) -> Result<Expr, ExprError> {
        if arg.is_zero() {
            return Ok(Expr::one());
        }
        if ctx.exp_of_ln {
            // exp(c*ln(v)) -> v^c for integer c (and c=1 in particular)
            if let Some((c, inner)) = arg.as_scaled_single_atom() {
                if let Atom::Ln(v) = inner {
                    if c.is_integer() {
                        return v.pow_int(
                            ctx,
                            num::ToPrimitive::to_i64(c.numer()).ok_or(ExprError::RewriteBudget)?,
                        );
                    }
                }
            }
        }
        Ok(Expr {
            num: Poly::atom(Atom::Exp(Box::new(arg.clone()))),
            den: Poly::one(),
        })
    }

    pub fn ln(ctx: &Context, arg: &Expr) -> Result<Expr, ExprError> {
        if ctx.ln_of_exp {
            if let Some((c, inner)) = arg.as_scaled_single_atom() {
                if c.is_one() {
                    if let Atom::Exp(v) = inner {
                        return Ok((**v).clone());
                    }
                }
            }
        }
        Ok(Expr {
            num: Poly::atom(Atom::Ln(Box::new(arg.clone()))),
            den: Poly::one(),
        })
    }

    // ----- inspection -----

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// `Some((c, atom))` when the expression is exactly `c * atom` with a
    /// trivial denominator.
    pub fn as_scaled_single_atom(&self) -> Option<(&BigRational, &Atom)> {
        if !self.den.is_one() || self.num.terms().len() != 1 {
            return None;
        }
        let (m, c) = &self.num.terms()[0];
        match m.factors() {
            [(a, 1)] => Some((c, a)),
            _ => None,
        }
    }

    /// The expression as a single atom, if it is one (coefficient 1).
    pub fn as_atom(&self) -> Option<&Atom> {
        self.as_scaled_single_atom()
            .filter(|(c, _)| c.is_one())
            .map(|(_, a)| a)
    }

    /// Visit every atom, descending into function arguments, exp/ln
    /// arguments and root bases. Defined atoms are opaque.
    pub fn visit_atoms<F: FnMut(&Atom)>(&self, f: &mut F) {
        fn visit_poly<F: FnMut(&Atom)>(p: &Poly, f: &mut F) {
            for (m, _) in p.terms() {
                for (a, _) in m.factors() {
                    visit_atom(a, f);
                }
            }
        }
        fn visit_atom<F: FnMut(&Atom)>(a: &Atom, f: &mut F) {
            f(a);
            match a {
                Atom::Func { args, .. } => {
                    for arg in args {
                        arg.visit_atoms(f);
                    }
                }
                Atom::Exp(e) | Atom::Ln(e) => e.visit_atoms(f),
                Atom::Root { base, .. } => visit_atom(base, f),
                _ => {}
            }
        }
        visit_poly(&self.num, f);
        visit_poly(&self.den, f);
    }

    /// All jet indices of `dep` occurring anywhere in the expression.
    pub fn jet_indices(&self, dep: DepId) -> std::collections::BTreeSet<MultiIndex> {
        let mut set = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Some(idx) = a.is_jet_of(dep) {
                set.insert(idx.clone());
            }
        });
        set
    }

    pub fn contains_atom_deep(&self, target: &Atom) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if a == target {
                found = true;
            }
        });
        found
    }

    pub(crate) fn references_def_at_or_after(&self, id: DefId) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if let Atom::Def(d) = a {
                if *d >= id {
                    found = true;
                }
            }
        });
        found
    }

    // ----- arithmetic -----

    pub fn add(ctx: &Context, a: &Expr, b: &Expr) -> Result<Expr, ExprError> {
        let (n, d) = add_parts(a, b, false);
        Expr::make(ctx, n, d)
    }

    pub fn sub(ctx: &Context, a: &Expr, b: &Expr) -> Result<Expr, ExprError> {
        let (n, d) = add_parts(a, b, true);
        Expr::make(ctx, n, d)
    }

    pub fn mul(ctx: &Context, a: &Expr, b: &Expr) -> Result<Expr, ExprError> {
        let (n, d) = mul_parts(&a.num, &a.den, &b.num, &b.den);
        Expr::make(ctx, n, d)
    }

    pub fn div(ctx: &Context, a: &Expr, b: &Expr) -> Result<Expr, ExprError> {
        if b.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let (n, d) = mul_parts(&a.num, &a.den, &b.den, &b.num);
        Expr::make(ctx, n, d)
    }

    pub fn neg(&self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }

    /// Scale by a rational constant (canonical form is preserved: the
    /// denominator stays primitive, the content lives in the numerator).
    pub fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { num: self.num.mul_scalar(c), den: self.den.clone() }
    }

    pub fn pow_int(&self, ctx: &Context, e: i64) -> Result<Expr, ExprError> {
        if e == 0 {
            return Ok(Expr::one());
        }
        if self.is_zero() {
            return if e > 0 { Ok(Expr::zero()) } else { Err(ExprError::ZeroToNegativePower) };
        }
        let k = e.unsigned_abs() as u32;
        let (n, d) = (self.num.pow(k), self.den.pow(k));
        if e > 0 {
            Expr::make(ctx, n, d)
        } else {
            Expr::make(ctx, d, n)
        }
    }

    /// Raise to a rational power. Fractional exponents are only defined on
    /// atoms (and exact rational constants); other bases are an error.
    pub fn pow_rational(&self, ctx: &Context, e: &BigRational) -> Result<Expr, ExprError> {
        if e.is_integer() {
            let k = num::ToPrimitive::to_i64(e.numer()).ok_or(ExprError::RewriteBudget)?;
            return self.pow_int(ctx, k);
        }
        if let Some(q) = self.as_rational() {
            return rational_root(q, e).map(Expr::from_rational);
        }
        let atom = self
            .as_atom()
            .ok_or(ExprError::FractionalPowerOfNonAtom)?
            .clone();
        atom_pow_rational(ctx, atom, e)
    }

    // ----- the normalization pipeline -----

    /// Normalize `num/den` into canonical form.
    pub(crate) fn make(ctx: &Context, num: Poly, den: Poly) -> Result<Expr, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let mut budget = REWRITE_BUDGET;
        let (mut n, mut d) = reduce_fixpoint(ctx, num, den, &mut budget)?;
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if n.is_zero() {
            return Ok(Expr::zero());
        }

        // clear degree-2 relation atoms from the denominator by conjugation
        loop {
            let Some(atom) = find_clearable_in_den(ctx, &d) else { break };
            spend(&mut budget)?;
            let uni = d.as_univariate(&atom);
            let d0 = uni.get(&0).cloned().unwrap_or_else(Poly::zero);
            let d1 = uni.get(&1).cloned().unwrap_or_else(Poly::zero);
            debug_assert!(uni.keys().all(|k| *k <= 1), "relation reduction keeps degree < 2");
            let conj = d0.sub(&d1.mul_term(&Mono::atom(atom.clone()), &BigRational::one()));
            let new_n = n.mul(&conj);
            let new_d = d.mul(&conj);
            let (nn, nd) = reduce_fixpoint(ctx, new_n, new_d, &mut budget)?;
            n = nn;
            d = nd;
            if d.is_zero() {
                // the relation made the denominator a zero divisor
                return Err(ExprError::DivisionByZero);
            }
            if n.is_zero() {
                return Ok(Expr::zero());
            }
        }

        // move an exp factor common to every denominator monomial into the
        // numerator (1/exp(a) = exp(-a))
        loop {
            let Some(arg) = common_exp_arg(&d) else { break };
            spend(&mut budget)?;
            let exp_atom = Atom::Exp(Box::new(arg.clone()));
            d = d.div_mono(&Mono::atom(exp_atom)).expect("common factor");
            let neg = Expr::exp(ctx, &arg.neg())?;
            debug_assert!(neg.den.is_one());
            let (nn, nd) = reduce_fixpoint(ctx, n.mul(&neg.num), d, &mut budget)?;
            n = nn;
            d = nd;
        }

        // cancel common polynomial factors
        let g = Poly::gcd(&n, &d);
        if !g.is_one() {
            n = n.div_exact(&g).expect("gcd divides");
            d = d.div_exact(&g).expect("gcd divides");
        }

        // make the denominator primitive with positive leading coefficient
        let c = d.content();
        if !c.is_one() {
            d = d.mul_scalar(&c.recip());
            n = n.mul_scalar(&c.recip());
        }
        Ok(Expr { num: n, den: d })
    }
}

fn spend(budget: &mut u32) -> Result<(), ExprError> {
    if *budget == 0 {
        return Err(ExprError::RewriteBudget);
    }
    *budget -= 1;
    Ok(())
}

/// Exact rational root `q^(p/r)`, when it exists.
fn rational_root(q: &BigRational, e: &BigRational) -> Result<BigRational, ExprError> {
    use num::ToPrimitive;
    let p = e.numer().to_i64().ok_or(ExprError::RewriteBudget)?;
    let r = e.denom().to_u32().ok_or(ExprError::RewriteBudget)?;
    if q.is_zero() {
        return if p > 0 { Ok(BigRational::zero()) } else { Err(ExprError::ZeroToNegativePower) };
    }
    let root_int = |n: &num::BigInt| -> Option<num::BigInt> {
        if n.is_negative() {
            return None;
        }
        let r_root = n.nth_root(r);
        if num::pow::pow(r_root.clone(), r as usize) == *n {
            Some(r_root)
        } else {
            None
        }
    };
    let rn = root_int(q.numer()).ok_or_else(|| ExprError::NoExactRoot(q.to_string(), r))?;
    let rd = root_int(q.denom()).ok_or_else(|| ExprError::NoExactRoot(q.to_string(), r))?;
    let base = BigRational::new(rn, rd);
    let mut out = num::pow::pow(base, p.unsigned_abs() as usize);
    if p < 0 {
        out = out.recip();
    }
    Ok(out)
}

/// `atom^(p/q)` with q >= 2: exp folds the exponent into its argument, roots
/// compose, and everything else becomes a root atom reduced by
/// `root^q -> atom`.
fn atom_pow_rational(ctx: &Context, atom: Atom, e: &BigRational) -> Result<Expr, ExprError> {
    use num::ToPrimitive;
    if let Atom::Exp(arg) = &atom {
        let scaled = arg.scale(e);
        return Expr::exp(ctx, &scaled);
    }
    let (base, eff) = match atom {
        Atom::Root { base, degree } => {
            let eff = e / BigRational::from_integer(degree.into());
            (*base, eff)
        }
        other => (other, e.clone()),
    };
    let p = eff.numer().to_i64().ok_or(ExprError::RewriteBudget)?;
    let q = eff.denom().to_u32().ok_or(ExprError::RewriteBudget)?;
    let node = if q == 1 {
        base
    } else {
        Atom::Root { base: Box::new(base), degree: q }
    };
    Expr::from_atom(ctx, node)?.pow_int(ctx, p)
}

// ----- rewrite pass machinery -----

fn relation_of<'c>(ctx: &'c Context, a: &Atom) -> Option<(u32, &'c Expr)> {
    match a {
        Atom::Def(id) => ctx.relation(*id).map(|r| (r.degree, &r.rhs)),
        _ => None,
    }
}

fn mono_is_reducible(ctx: &Context, m: &Mono) -> bool {
    let mut exp_seen = false;
    for (a, e) in m.factors() {
        match a {
            Atom::Exp(_) => {
                if exp_seen || *e >= 2 {
                    return true;
                }
                exp_seen = true;
            }
            Atom::Root { base, degree } => {
                if *e >= *degree {
                    return true;
                }
                if let Some((1, _)) = relation_of(ctx, base) {
                    return true;
                }
            }
            Atom::Def(_) => {
                if let Some((d, _)) = relation_of(ctx, a) {
                    if *e >= d {
                        return true;
                    }
                }
            }
            _ => {}
        }
    }
    false
}

fn poly_is_reducible(ctx: &Context, p: &Poly) -> bool {
    p.terms().iter().any(|(m, _)| mono_is_reducible(ctx, m))
}

/// Rewrite every reducible factor of the monomial one layer, producing a
/// ratio of polynomials (relation right-hand sides may carry denominators).
fn reduce_term_once(
    ctx: &Context,
    m: &Mono,
    c: &BigRational,
) -> Result<(Poly, Poly), ExprError> {
    let mut kept: Vec<(Atom, u32)> = Vec::new();
    let mut num = Poly::constant(c.clone());
    let mut den = Poly::one();
    let mut exp_arg: Option<Expr> = None;
    let mul_ratio = |num: &mut Poly, den: &mut Poly, rn: &Poly, rd: &Poly| {
        *num = num.mul(rn);
        *den = den.mul(rd);
    };

    for (a, e) in m.factors() {
        match a {
            Atom::Exp(arg) => {
                let scaled = arg.scale(&BigRational::from_integer((*e).into()));
                exp_arg = Some(match exp_arg.take() {
                    None => scaled,
                    Some(prev) => Expr::add(ctx, &prev, &scaled)?,
                });
            }
            Atom::Root { base, degree } => {
                if let Some((1, rhs)) = relation_of(ctx, base) {
                    // the base atom is eliminated by a degree-1 relation:
                    // root(base)^e -> rhs^(e/degree)
                    let frac = BigRational::new((*e).into(), (*degree).into());
                    let img = rhs.clone().pow_rational(ctx, &frac)?;
                    mul_ratio(&mut num, &mut den, &img.num, &img.den);
                } else if *e >= *degree {
                    let whole = e / degree;
                    let rem = e % degree;
                    kept.push(((**base).clone(), whole));
                    if rem > 0 {
                        kept.push((a.clone(), rem));
                    }
                } else {
                    kept.push((a.clone(), *e));
                }
            }
            Atom::Def(_) => match relation_of(ctx, a) {
                Some((d, rhs)) if *e >= d => {
                    let whole = (e / d) as i64;
                    let rem = e % d;
                    let img = rhs.pow_int(ctx, whole)?;
                    mul_ratio(&mut num, &mut den, &img.num, &img.den);
                    if rem > 0 {
                        kept.push((a.clone(), rem));
                    }
                }
                _ => kept.push((a.clone(), *e)),
            },
            _ => kept.push((a.clone(), *e)),
        }
    }

    if let Some(arg) = exp_arg {
        let piece = Expr::exp(ctx, &arg)?;
        mul_ratio(&mut num, &mut den, &piece.num, &piece.den);
    }
    let kept_mono = Mono::from_factors(kept);
    num = num.mul_term(&kept_mono, &BigRational::one());
    Ok((num, den))
}

fn reduce_poly_once(ctx: &Context, p: &Poly) -> Result<(Poly, Poly), ExprError> {
    let mut acc_n = Poly::zero();
    let mut acc_d = Poly::one();
    for (m, c) in p.terms() {
        let (tn, td) = if mono_is_reducible(ctx, m) {
            reduce_term_once(ctx, m, c)?
        } else {
            (Poly::term(m.clone(), c.clone()), Poly::one())
        };
        // acc + tn/td
        acc_n = acc_n.mul(&td).add(&tn.mul(&acc_d));
        acc_d = acc_d.mul(&td);
    }
    Ok((acc_n, acc_d))
}

/// Apply relation and exp rewrites to numerator and denominator until no
/// reducible factor remains.
fn reduce_fixpoint(
    ctx: &Context,
    mut n: Poly,
    mut d: Poly,
    budget: &mut u32,
) -> Result<(Poly, Poly), ExprError> {
    loop {
        let rn = poly_is_reducible(ctx, &n);
        let rd = poly_is_reducible(ctx, &d);
        if !rn && !rd {
            return Ok((n, d));
        }
        spend(budget)?;
        if rn {
            let (a, b) = reduce_poly_once(ctx, &n)?;
            n = a;
            d = d.mul(&b);
        } else {
            let (a, b) = reduce_poly_once(ctx, &d)?;
            d = a;
            n = n.mul(&b);
        }
    }
}

/// An atom in the denominator that carries a degree-2 power relation (defined
/// atom or root), which conjugation can clear.
fn find_clearable_in_den(ctx: &Context, d: &Poly) -> Option<Atom> {
    for a in d.atoms() {
        match a {
            Atom::Def(_) => {
                if let Some((2, _)) = relation_of(ctx, a) {
                    return Some(a.clone());
                }
            }
            Atom::Root { degree: 2, .. } => return Some(a.clone()),
            _ => {}
        }
    }
    None
}

/// When every monomial of the denominator shares one exp factor, return its
/// argument.
fn common_exp_arg(d: &Poly) -> Option<Expr> {
    let g = d.monomial_gcd();
    for (a, _) in g.factors() {
        if let Atom::Exp(arg) = a {
            return Some((**arg).clone());
        }
    }
    None
}
