//! Differential constraints in solved form and reduction of expressions
//! modulo their prolongations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use expr_core::{Atom, Bindings, Context, DepId, Expr, FuncId, MultiIndex, VarId};

use crate::derive::total_derivative;
use crate::error::JetError;

/// A differential family: the jets of a dependent variable, or the
/// derivatives of a function symbol applied to a fixed tuple of independent
/// variables (the multi-index then runs over the argument slots).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Dep(DepId),
    Func { id: FuncId, args: Vec<VarId> },
}

impl Family {
    /// The independent variable differentiated by bumping `slot`.
    fn slot_var(&self, slot: usize) -> VarId {
        match self {
            Family::Dep(_) => VarId(slot as u32),
            Family::Func { args, .. } => args[slot],
        }
    }

    fn atom(&self, ctx: &Context, index: &MultiIndex) -> Result<Expr, JetError> {
        match self {
            Family::Dep(dep) => Ok(Expr::jet(*dep, index.clone())),
            Family::Func { id, args } => {
                let arg_exprs = args.iter().map(|v| Expr::indep(ctx, *v)).collect();
                Ok(Expr::func(ctx, *id, index.counts().to_vec(), arg_exprs)?)
            }
        }
    }

    fn describe(&self, ctx: &Context, index: &MultiIndex) -> String {
        match self {
            Family::Dep(dep) => format!("{}{}", ctx.dep_name(*dep), index),
            Family::Func { id, .. } => format!("{}{}", ctx.func(*id).name, index),
        }
    }
}

/// Classify an atom as a member of a differential family. Function
/// applications count only when every argument is a bare independent
/// variable (so its derivatives form a jet-like family).
pub fn classify(a: &Atom) -> Option<(Family, MultiIndex)> {
    match a {
        Atom::Jet { dep, index } => Some((Family::Dep(*dep), index.clone())),
        Atom::Func { id, dorders, args } => {
            let mut vars = Vec::with_capacity(args.len());
            for arg in args {
                match arg.as_atom() {
                    Some(Atom::Indep(v)) => vars.push(*v),
                    _ => return None,
                }
            }
            Some((
                Family::Func { id: *id, args: vars },
                MultiIndex::from_counts(dorders.clone()),
            ))
        }
        _ => None,
    }
}

/// A differential equation in solved form: leading derivative = lower-ranked
/// right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub family: Family,
    pub lead: MultiIndex,
    pub rhs: Expr,
}

impl Constraint {
    /// Solved-form constraint on a jet variable, under the graded-lex
    /// ranking: every jet of the same dependent variable in the right-hand
    /// side must rank strictly below the leader.
    pub fn new(ctx: &Context, dep: DepId, lead: MultiIndex, rhs: Expr) -> Result<Self, JetError> {
        let family = Family::Dep(dep);
        let c = Constraint { family, lead, rhs };
        c.check_solved(ctx)?;
        Ok(c)
    }

    /// Build from `lead_atom = rhs`, where the atom is a jet variable or a
    /// function application on distinct independent variables.
    pub fn from_atom(ctx: &Context, lead_atom: &Atom, rhs: Expr) -> Result<Self, JetError> {
        let (family, lead) = classify(lead_atom).ok_or_else(|| JetError::NotSolvedForm {
            lead: format!("{lead_atom:?}"),
            why: "leading side must be a jet variable or a function-symbol derivative".into(),
        })?;
        if let Family::Func { args, .. } = &family {
            let distinct: BTreeSet<_> = args.iter().collect();
            if distinct.len() != args.len() {
                return Err(JetError::BadFuncConstraintArgs);
            }
        }
        let c = Constraint { family, lead, rhs };
        c.check_solved(ctx)?;
        Ok(c)
    }

    /// The equation as an expression required to vanish: lead - rhs.
    pub fn residual(&self, ctx: &Context) -> Result<Expr, JetError> {
        let lead = self.family.atom(ctx, &self.lead)?;
        Ok(Expr::sub(ctx, &lead, &self.rhs)?)
    }

    fn check_solved(&self, ctx: &Context) -> Result<(), JetError> {
        let mut bad: Option<String> = None;
        let mut evolution_slot_ok = vec![false; self.lead.len()];
        let mut same_family_indices: Vec<MultiIndex> = Vec::new();
        self.rhs.visit_atoms(&mut |a| {
            if let Some((fam, idx)) = classify(a) {
                if fam == self.family {
                    if idx.contains(&self.lead) {
                        bad = Some(fam.describe(ctx, &idx));
                    }
                    same_family_indices.push(idx);
                }
            }
        });
        if let Some(atom) = bad {
            return Err(JetError::NotSolvedForm {
                lead: self.family.describe(ctx, &self.lead),
                why: format!("right-hand side contains the derivative {atom} of the leader"),
            });
        }
        // termination: some slot of the leader strictly dominates every
        // same-family atom of the rhs, so each rewrite lowers that order
        for slot in 0..self.lead.len() {
            if self.lead.count(slot) == 0 {
                continue;
            }
            evolution_slot_ok[slot] = same_family_indices
                .iter()
                .all(|idx| idx.count(slot) < self.lead.count(slot));
        }
        if self.lead.is_zero() || evolution_slot_ok.iter().any(|&ok| ok) {
            Ok(())
        } else {
            Err(JetError::NotSolvedForm {
                lead: self.family.describe(ctx, &self.lead),
                why: "no derivative slot of the leader dominates the right-hand side".into(),
            })
        }
    }
}

/// Memoizing reducer: prolongs constraints on demand and rewrites leading
/// derivatives to a fixed point.
pub struct Reducer<'c> {
    ctx: &'c Context,
    constraints: Vec<Constraint>,
    images: HashMap<(Family, MultiIndex), Expr>,
    depth: u32,
}

const DEPTH_CAP: u32 = 512;
const PASS_CAP: u32 = 16;

impl<'c> Reducer<'c> {
    pub fn new(ctx: &'c Context, constraints: &[Constraint]) -> Self {
        Reducer {
            ctx,
            constraints: constraints.to_vec(),
            images: HashMap::new(),
            depth: 0,
        }
    }

    /// Replace every derivative of a constrained leader by its image, to a
    /// fixed point.
    pub fn reduce(&mut self, e: &Expr) -> Result<Expr, JetError> {
        let mut current = e.clone();
        for _ in 0..PASS_CAP {
            let targets = self.reducible_atoms(&current);
            if targets.is_empty() {
                return Ok(current);
            }
            let mut bindings = Bindings::new();
            for (atom, family, index) in targets {
                let img = self.image(&family, &index)?;
                bindings.insert(atom, img);
            }
            current = current.substitute(self.ctx, &bindings, &[])?;
        }
        Err(JetError::OrderCap)
    }

    fn reducible_atoms(&self, e: &Expr) -> Vec<(Atom, Family, MultiIndex)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        e.visit_atoms(&mut |a| {
            if !seen.insert(a.clone()) {
                return;
            }
            if let Some((family, index)) = classify(a) {
                let applicable = self
                    .constraints
                    .iter()
                    .any(|c| c.family == family && index.contains(&c.lead));
                if applicable {
                    out.push((a.clone(), family, index));
                }
            }
        });
        out
    }

    /// Fully reduced image of the derivative `index` of a constrained family.
    /// When several constraints apply their images must agree.
    pub fn image(&mut self, family: &Family, index: &MultiIndex) -> Result<Expr, JetError> {
        if let Some(img) = self.images.get(&(family.clone(), index.clone())) {
            return Ok(img.clone());
        }
        self.depth += 1;
        if self.depth > DEPTH_CAP {
            return Err(JetError::OrderCap);
        }
        let applicable: Vec<Constraint> = self
            .constraints
            .iter()
            .filter(|c| c.family == *family && index.contains(&c.lead))
            .cloned()
            .collect();
        debug_assert!(!applicable.is_empty());
        let mut result: Option<Expr> = None;
        for c in &applicable {
            let img = self.image_via(c, family, index)?;
            match &result {
                None => result = Some(img),
                Some(prev) => {
                    if *prev != img {
                        self.depth -= 1;
                        return Err(JetError::Inconsistent {
                            lead: family.describe(self.ctx, index),
                        });
                    }
                }
            }
        }
        self.depth -= 1;
        let img = result.expect("at least one applicable constraint");
        self.images
            .insert((family.clone(), index.clone()), img.clone());
        Ok(img)
    }

    fn image_via(
        &mut self,
        c: &Constraint,
        family: &Family,
        index: &MultiIndex,
    ) -> Result<Expr, JetError> {
        if *index == c.lead {
            return self.reduce(&c.rhs.clone());
        }
        // lower one derivative along the first slot above the leader
        let slot = (0..index.len())
            .find(|&s| index.count(s) > c.lead.count(s))
            .expect("index strictly contains the leader");
        let below = index.lower(slot).expect("positive count");
        let sub = self.image(family, &below)?;
        let v = family.slot_var(slot);
        let d = total_derivative(self.ctx, &sub, v)?;
        self.reduce(&d)
    }
}

/// Reduce `e` modulo the constraints and their differential consequences.
pub fn reduce_mod(ctx: &Context, e: &Expr, cs: &[Constraint]) -> Result<Expr, JetError> {
    Reducer::new(ctx, cs).reduce(e)
}

/// The constraints together with all their total derivatives up to the
/// multi-index bound, each re-solved for its leading derivative and
/// inter-reduced against the set.
pub fn prolong_constraints(
    ctx: &Context,
    cs: &[Constraint],
    bound: &MultiIndex,
) -> Result<Vec<Constraint>, JetError> {
    let mut reducer = Reducer::new(ctx, cs);
    let mut out: Vec<Constraint> = Vec::new();
    let mut seen: BTreeSet<(Family, MultiIndex)> = BTreeSet::new();
    for c in cs {
        for index in box_between(&c.lead, bound) {
            if !seen.insert((c.family.clone(), index.clone())) {
                continue;
            }
            let rhs = reducer.image(&c.family, &index)?;
            out.push(Constraint { family: c.family.clone(), lead: index, rhs });
        }
    }
    out.sort_by(|a, b| a.family.cmp(&b.family).then(a.lead.graded_lex(&b.lead)));
    Ok(out)
}

/// All multi-indices J with lo <= J <= hi componentwise, in graded order.
fn box_between(lo: &MultiIndex, hi: &MultiIndex) -> Vec<MultiIndex> {
    if !hi.contains(lo) {
        // nothing above the leader fits under the bound except the leader itself
        return vec![lo.clone()];
    }
    let mut out = vec![MultiIndex::zero(lo.len())];
    for slot in 0..lo.len() {
        let mut next = Vec::new();
        for prefix in &out {
            for c in lo.count(slot)..=hi.count(slot) {
                let mut counts = prefix.counts().to_vec();
                counts[slot] = c;
                next.push(MultiIndex::from_counts(counts));
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.graded_lex(b));
    out
}

/// Largest multi-index (componentwise join) of the family's atoms in `e`,
/// used as the default prolongation bound.
pub fn max_index_of_family(e: &Expr, family: &Family) -> Option<MultiIndex> {
    let mut best: Option<MultiIndex> = None;
    e.visit_atoms(&mut |a| {
        if let Some((fam, idx)) = classify(a) {
            if fam == *family {
                best = Some(match &best {
                    None => idx,
                    Some(b) => b.join(&idx),
                });
            }
        }
    });
    best
}

/// Group constraints by family.
pub fn families(cs: &[Constraint]) -> BTreeMap<Family, Vec<Constraint>> {
    let mut map: BTreeMap<Family, Vec<Constraint>> = BTreeMap::new();
    for c in cs {
        map.entry(c.family.clone()).or_default().push(c.clone());
    }
    map
}
