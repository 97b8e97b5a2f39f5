//! Canonical DSL printing. `parse(print(e))` is the identity on canonical
//! expressions, which the property tests rely on.

use num::{BigRational, One, Signed};

use crate::atom::Atom;
use crate::context::Context;
use crate::expr::Expr;
use crate::poly::{Mono, Poly};

impl Expr {
    /// Render in the expression DSL.
    pub fn print(&self, ctx: &Context) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let num = &self.numerator();
        let den = &self.denominator();
        if den.is_one() {
            return print_poly(ctx, num);
        }
        let num_str = if num.terms().len() == 1 {
            print_poly(ctx, num)
        } else {
            format!("({})", print_poly(ctx, num))
        };
        let den_str = if den_needs_parens(den) {
            format!("({})", print_poly(ctx, den))
        } else {
            print_poly(ctx, den)
        };
        format!("{num_str}/{den_str}")
    }
}

fn den_needs_parens(den: &Poly) -> bool {
    match den.terms() {
        [(m, c)] => !(c.is_one() && m.factors().len() == 1),
        _ => true,
    }
}

fn print_poly(ctx: &Context, p: &Poly) -> String {
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&print_term(ctx, m, &abs));
    }
    out
}

fn print_term(ctx: &Context, m: &Mono, abs_coeff: &BigRational) -> String {
    if m.is_one() {
        return print_rational(abs_coeff);
    }
    let mono = print_mono(ctx, m);
    if abs_coeff.is_one() {
        mono
    } else {
        format!("{}*{}", print_rational(abs_coeff), mono)
    }
}

fn print_mono(ctx: &Context, m: &Mono) -> String {
    m.factors()
        .iter()
        .map(|(a, e)| print_factor(ctx, a, *e))
        .collect::<Vec<_>>()
        .join("*")
}

fn print_factor(ctx: &Context, a: &Atom, e: u32) -> String {
    if let Atom::Root { base, degree } = a {
        // print the root together with its power as a fractional exponent
        return format!("{}^({}/{})", print_atom_base(ctx, base), e, degree);
    }
    let base = print_atom(ctx, a);
    if e == 1 {
        base
    } else {
        format!("{base}^{e}")
    }
}

fn print_atom_base(ctx: &Context, a: &Atom) -> String {
    // base of a power: atoms are self-delimiting in the DSL
    print_atom(ctx, a)
}

pub(crate) fn print_atom(ctx: &Context, a: &Atom) -> String {
    match a {
        Atom::Indep(v) => ctx.indep_name(*v).to_string(),
        Atom::Param(p) => ctx.param_name(*p).to_string(),
        Atom::Jet { dep, index } => {
            if index.is_zero() {
                ctx.dep_name(*dep).to_string()
            } else {
                let mut vars = Vec::new();
                for (slot, count) in index.counts().iter().enumerate() {
                    for _ in 0..*count {
                        vars.push(ctx.indep_names()[slot].as_str());
                    }
                }
                format!("{}[{}]", ctx.dep_name(*dep), vars.join(","))
            }
        }
        Atom::Func { id, dorders, args } => {
            let name = &ctx.func(*id).name;
            let args_str = args
                .iter()
                .map(|e| e.print(ctx))
                .collect::<Vec<_>>()
                .join(",");
            if dorders.iter().all(|&d| d == 0) {
                format!("{name}({args_str})")
            } else {
                let orders = dorders
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("d({name},{orders})({args_str})")
            }
        }
        Atom::Exp(arg) => format!("exp({})", arg.print(ctx)),
        Atom::Ln(arg) => format!("ln({})", arg.print(ctx)),
        Atom::Root { base, degree } => {
            format!("{}^(1/{})", print_atom_base(ctx, base), degree)
        }
        Atom::Def(d) => ctx.defined(*d).name.clone(),
    }
}

fn print_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
