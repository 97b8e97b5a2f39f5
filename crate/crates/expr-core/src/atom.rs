use std::cmp::Ordering;

use crate::context::{DefId, DepId, FuncId, ParamId, VarId};
use crate::expr::Expr;
use crate::multi_index::MultiIndex;

/// An atom of the rational normal form: an indivisible coordinate of the
/// expression algebra. Sums and products are never atoms; function
/// applications, exp and ln are opaque atoms keyed by their normalized
/// arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// Independent variable x_i.
    Indep(VarId),
    /// Named commuting constant.
    Param(ParamId),
    /// Jet variable u_J: the dependent variable `dep` differentiated per the
    /// multi-index (order 0 is the dependent variable itself).
    Jet { dep: DepId, index: MultiIndex },
    /// Function-symbol application, with a derivative order per argument.
    Func {
        id: FuncId,
        dorders: Vec<u32>,
        args: Vec<Expr>,
    },
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    /// `base^(1/degree)` for degree >= 2; reduced by `root^degree -> base`.
    Root { base: Box<Atom>, degree: u32 },
    /// Defined atom with user-declared rules.
    Def(DefId),
}

impl Atom {
    pub fn jet0(dep: DepId, indep_count: usize) -> Atom {
        Atom::Jet { dep, index: MultiIndex::zero(indep_count) }
    }

    /// Category rank implementing the global atom order: independent
    /// variables < parameters < jet variables < function applications
    /// < exp < ln < roots < defined atoms.
    fn rank(&self) -> u8 {
        match self {
            Atom::Indep(_) => 0,
            Atom::Param(_) => 1,
            Atom::Jet { .. } => 2,
            Atom::Func { .. } => 3,
            Atom::Exp(_) => 4,
            Atom::Ln(_) => 5,
            Atom::Root { .. } => 6,
            Atom::Def(_) => 7,
        }
    }

    pub fn is_jet_of(&self, dep: DepId) -> Option<&MultiIndex> {
        match self {
            Atom::Jet { dep: d, index } if *d == dep => Some(index),
            _ => None,
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Atom::Indep(a), Atom::Indep(b)) => a.cmp(b),
            (Atom::Param(a), Atom::Param(b)) => a.cmp(b),
            (Atom::Jet { dep: d1, index: i1 }, Atom::Jet { dep: d2, index: i2 }) => {
                d1.cmp(d2).then_with(|| i1.graded_lex(i2))
            }
            (
                Atom::Func { id: f1, dorders: o1, args: a1 },
                Atom::Func { id: f2, dorders: o2, args: a2 },
            ) => f1.cmp(f2).then_with(|| o1.cmp(o2)).then_with(|| a1.cmp(a2)),
            (Atom::Exp(a), Atom::Exp(b)) => a.cmp(b),
            (Atom::Ln(a), Atom::Ln(b)) => a.cmp(b),
            (
                Atom::Root { base: b1, degree: d1 },
                Atom::Root { base: b2, degree: d2 },
            ) => b1.cmp(b2).then_with(|| d1.cmp(d2)),
            (Atom::Def(a), Atom::Def(b)) => a.cmp(b),
            _ => unreachable!("rank already distinguished the categories"),
        })
    }
}
