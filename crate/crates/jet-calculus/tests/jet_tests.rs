use expr_core::{parse, Context, Expr, MultiIndex, VarId};
use jet_calculus::{
    prolong_constraints, reduce_mod, total_derivative, validate_context, Constraint, JetError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn base_ctx() -> Context {
    let mut ctx = Context::new();
    ctx.add_indep("x").unwrap();
    ctx.add_indep("t").unwrap();
    ctx.add_dep("u").unwrap();
    ctx.add_param("A").unwrap();
    ctx.add_param("B").unwrap();
    ctx.add_func("h", 1).unwrap();
    ctx.add_func("f", 2).unwrap();
    ctx
}

fn p(ctx: &Context, s: &str) -> Expr {
    parse(ctx, s).unwrap_or_else(|e| panic!("parse `{s}`: {e}"))
}

fn x() -> VarId {
    VarId(0)
}

fn t() -> VarId {
    VarId(1)
}

fn constraint(ctx: &Context, lead: &str, rhs: &str) -> Constraint {
    let lead_atom = expr_core::parse_jet_ref(ctx, lead)
        .or_else(|_| {
            parse(ctx, lead)
                .map(|e| e.as_atom().cloned().expect("atom"))
                .map_err(|e| e)
        })
        .unwrap();
    Constraint::from_atom(ctx, &lead_atom, p(ctx, rhs)).unwrap()
}

#[test]
fn total_derivative_of_jets_and_powers() {
    let ctx = base_ctx();
    assert_eq!(total_derivative(&ctx, &p(&ctx, "u"), x()).unwrap(), p(&ctx, "u[x]"));
    assert_eq!(
        total_derivative(&ctx, &p(&ctx, "u[x]^2"), x()).unwrap(),
        p(&ctx, "2*u[x]*u[x,x]")
    );
}

#[test]
fn total_derivative_chain_rule_on_function_symbols() {
    let ctx = base_ctx();
    let e = p(&ctx, "h(u + u[x]^-1)");
    let d = total_derivative(&ctx, &e, x()).unwrap();
    let expected = p(&ctx, "d(h,1)(u + u[x]^-1) * (u[x] - u[x,x]/u[x]^2)");
    assert_eq!(d, expected);
}

#[test]
fn prolongation_examples() {
    let ctx = base_ctx();
    let c = constraint(&ctx, "u[x,x]", "u[x]^3");
    // once in x: u_xxx = 3 u_x^5
    let out = prolong_constraints(&ctx, &[c.clone()], &MultiIndex::from_counts(vec![3, 0])).unwrap();
    assert_eq!(out.len(), 2);
    assert_eq!(out[1].lead, MultiIndex::from_counts(vec![3, 0]));
    assert_eq!(out[1].rhs, p(&ctx, "3*u[x]^5"));
    // once in t: u_xxt = 3 u_x^2 u_xt
    let out = prolong_constraints(&ctx, &[c.clone()], &MultiIndex::from_counts(vec![2, 1])).unwrap();
    assert_eq!(out[1].lead, MultiIndex::from_counts(vec![2, 1]));
    assert_eq!(out[1].rhs, p(&ctx, "3*u[x]^2*u[x,t]"));
    // linear constraint with a function-symbol coefficient
    let c = constraint(&ctx, "u[x,x]", "f(t,x)*u");
    let out = prolong_constraints(&ctx, &[c], &MultiIndex::from_counts(vec![3, 0])).unwrap();
    assert_eq!(out[1].rhs, p(&ctx, "d(f,0,1)(t,x)*u + f(t,x)*u[x]"));
}

#[test]
fn reduce_mod_examples() {
    let ctx = base_ctx();
    let c = constraint(&ctx, "u[x,x]", "u[x]^3");
    let e = p(&ctx, "u[x,x] - u[x]^3");
    assert!(reduce_mod(&ctx, &e, &[c.clone()]).unwrap().is_zero());
    assert_eq!(
        reduce_mod(&ctx, &p(&ctx, "u[x,x,x]"), &[c.clone()]).unwrap(),
        p(&ctx, "3*u[x]^5")
    );
    let lin = constraint(&ctx, "u[x,x]", "f(t,x)*u");
    assert_eq!(
        reduce_mod(&ctx, &p(&ctx, "u[x,x]*u[x]/u"), &[lin]).unwrap(),
        p(&ctx, "f(t,x)*u[x]")
    );
}

#[test]
fn reduce_mod_substitutes_inside_compound_atoms() {
    let ctx = base_ctx();
    let c = constraint(&ctx, "u[x]", "u");
    let e = p(&ctx, "h(u[x] + u) + exp(u[x])");
    let out = reduce_mod(&ctx, &e, &[c]).unwrap();
    assert_eq!(out, p(&ctx, "h(2*u) + exp(u)"));
}

#[test]
fn reduce_mod_is_idempotent_and_leaves_no_leaders(
) {
    let ctx = base_ctx();
    let c = constraint(&ctx, "u[x,x]", "u[x]^3");
    let e = p(&ctx, "u[x,x,x]*u[x,t] + h(u[x,x])");
    let once = reduce_mod(&ctx, &e, &[c.clone()]).unwrap();
    let twice = reduce_mod(&ctx, &once, &[c.clone()]).unwrap();
    assert_eq!(once, twice);
    let mut max_x_order = 0;
    once.visit_atoms(&mut |a| {
        if let expr_core::Atom::Jet { index, .. } = a {
            max_x_order = max_x_order.max(index.count(0));
        }
    });
    assert!(max_x_order < 2, "reduced form still contains a leader derivative");
}

#[test]
fn function_symbol_rule_reduces_mixed_derivatives() {
    let ctx = base_ctx();
    // f_t = 6 f f_x - f_xxx, an evolution rule on the symbol f(t,x)
    let lead = p(&ctx, "d(f,1,0)(t,x)").as_atom().unwrap().clone();
    let rule = Constraint::from_atom(
        &ctx,
        &lead,
        p(&ctx, "6*f(t,x)*d(f,0,1)(t,x) - d(f,0,3)(t,x)"),
    )
    .unwrap();
    let e = p(&ctx, "d(f,1,1)(t,x)");
    let out = reduce_mod(&ctx, &e, &[rule]).unwrap();
    let expected = p(
        &ctx,
        "6*d(f,0,1)(t,x)^2 + 6*f(t,x)*d(f,0,2)(t,x) - d(f,0,4)(t,x)",
    );
    assert_eq!(out, expected);
}

#[test]
fn solved_form_violations_are_rejected() {
    let ctx = base_ctx();
    let lead = expr_core::parse_jet_ref(&ctx, "u[x]").unwrap();
    let err = Constraint::from_atom(&ctx, &lead, p(&ctx, "u[x,x]")).unwrap_err();
    assert!(matches!(err, JetError::NotSolvedForm { .. }));
}

#[test]
fn inconsistent_prolongations_are_reported() {
    let ctx = base_ctx();
    // u_x = u and u_t = 0 force u_xt = u_t = 0 and u_tx = D_x(0) = 0: fine.
    // u_x = u and u_t = u force u_xt = u from one path, u_x = u from the other: also fine.
    // u_x = t is inconsistent with u_t = 0: u_xt = 1 vs 0.
    let c1 = constraint(&ctx, "u[x]", "t");
    let c2 = constraint(&ctx, "u[t]", "0");
    let e = p(&ctx, "u[x,t]");
    let err = reduce_mod(&ctx, &e, &[c1, c2]).unwrap_err();
    assert!(matches!(err, JetError::Inconsistent { .. }));
}

#[test]
fn defined_atom_rules_validate_against_relation() {
    let mut ctx = base_ctx();
    ctx.add_func("phi1", 1).unwrap();
    let r = ctx.add_defined("r").unwrap();
    ctx.set_relation(r, 2, p(&ctx, "phi1(t) - 2*x")).unwrap();
    ctx.set_drule(r, x(), p(&ctx, "-1/r"));
    ctx.set_drule(r, t(), p(&ctx, "d(phi1,1)(t)/(2*r)"));
    validate_context(&ctx).unwrap();

    // a bad x-rule is caught
    let mut bad = base_ctx();
    bad.add_func("phi1", 1).unwrap();
    let r = bad.add_defined("r").unwrap();
    bad.set_relation(r, 2, p(&bad, "phi1(t) - 2*x")).unwrap();
    bad.set_drule(r, x(), p(&bad, "1/r"));
    assert!(validate_context(&bad).is_err());
}

#[test]
fn missing_derivative_rule_is_an_error() {
    let mut ctx = base_ctx();
    let s = ctx.add_defined("s").unwrap();
    ctx.set_drule(s, x(), p(&ctx, "1"));
    let e = p(&ctx, "s*u");
    assert!(total_derivative(&ctx, &e, x()).is_ok());
    let err = total_derivative(&ctx, &e, t()).unwrap_err();
    assert!(matches!(err, JetError::MissingDerivativeRule { .. }));
}

// ----- randomized properties -----

fn random_expr(ctx: &Context, rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..8) {
            0 => p(ctx, "x"),
            1 => p(ctx, "t"),
            2 => p(ctx, "u"),
            3 => p(ctx, "u[x]"),
            4 => p(ctx, "u[t]"),
            5 => p(ctx, "A"),
            6 => p(ctx, "exp(u)"),
            _ => Expr::from_int(rng.gen_range(-3..=3)),
        };
    }
    let a = random_expr(ctx, rng, depth - 1);
    let b = random_expr(ctx, rng, depth - 1);
    match rng.gen_range(0..6) {
        0 | 1 => Expr::add(ctx, &a, &b).unwrap(),
        2 | 3 => Expr::mul(ctx, &a, &b).unwrap(),
        4 => Expr::sub(ctx, &a, &b).unwrap(),
        _ => match Expr::div(ctx, &a, &b) {
            Ok(e) => e,
            Err(_) => a,
        },
    }
}

#[test]
fn total_derivatives_commute() {
    let ctx = base_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..120 {
        let e = random_expr(&ctx, &mut rng, 3);
        let dxt = total_derivative(&ctx, &total_derivative(&ctx, &e, x()).unwrap(), t()).unwrap();
        let dtx = total_derivative(&ctx, &total_derivative(&ctx, &e, t()).unwrap(), x()).unwrap();
        assert_eq!(dxt, dtx, "D_x D_t != D_t D_x on {}", e.print(&ctx));
    }
}

#[test]
fn total_derivative_is_a_derivation() {
    let ctx = base_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..120 {
        let a = random_expr(&ctx, &mut rng, 2);
        let b = random_expr(&ctx, &mut rng, 2);
        let prod = Expr::mul(&ctx, &a, &b).unwrap();
        let lhs = total_derivative(&ctx, &prod, x()).unwrap();
        let rhs = Expr::add(
            &ctx,
            &Expr::mul(&ctx, &total_derivative(&ctx, &a, x()).unwrap(), &b).unwrap(),
            &Expr::mul(&ctx, &a, &total_derivative(&ctx, &b, x()).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn reduce_mod_idempotence_randomized() {
    let ctx = base_ctx();
    let c = constraint(&ctx, "u[x,x]", "u[x]^3");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let e = random_expr(&ctx, &mut rng, 3);
        let once = reduce_mod(&ctx, &e, &[c.clone()]).unwrap();
        let twice = reduce_mod(&ctx, &once, &[c.clone()]).unwrap();
        assert_eq!(once, twice);
    }
}
