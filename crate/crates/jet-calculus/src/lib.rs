//! Jet calculus: total derivatives on jet expressions and normal-form
//! reduction modulo prolonged differential constraints.
//!
//! Constraints are kept in solved form (leading derivative = lower-ranked
//! right-hand side) under a graded-lex ranking on multi-indices with the
//! independent-variable order taken from the context. Constraint sets are
//! assumed triangular and compatible; an inconsistent prolongation is
//! reported, not resolved.

mod constraint;
mod derive;
mod error;

pub use constraint::{
    classify, families, max_index_of_family, prolong_constraints, reduce_mod, Constraint, Family,
    Reducer,
};
pub use derive::{total_derivative, total_derivative_multi, validate_context};
pub use error::JetError;
