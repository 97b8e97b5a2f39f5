//! Expression representation for jet-space symbolic computation: parsing,
//! canonical normalization with a sound zero test, printing, and atom-level
//! differentiation.
//!
//! Coefficients are exact rationals; the canonical form is a single fraction
//! of two multivariate polynomials over the atom set. Transcendental nodes
//! (exp, ln, function applications) are opaque atoms keyed by their
//! normalized arguments; the built-in relations are
//! `exp(a)*exp(b) -> exp(a+b)`, `exp(0) -> 1`, and the optional
//! `ln(exp(v)) -> v` / `exp(ln(v)) -> v` (both on by default). Rational
//! exponents are only defined on atoms; fractional powers of compound
//! expressions are expressed through defined atoms carrying a power relation
//! such as `r^2 = phi1 - 2*x`.
//!
//! Expressions are immutable values and every operation is a pure function
//! of `(Context, Expr)`.

mod atom;
mod context;
mod diff;
mod error;
mod eval;
mod expr;
mod multi_index;
mod parse;
mod poly;
mod print;

pub use atom::Atom;
pub use context::{Context, DefId, DepId, FuncId, NameKind, ParamId, VarId, RESERVED};
pub use error::{ContextError, EvalError, ExprError, ParseError};
pub use eval::{poly_derivative_value, EvalEnv, MapEnv};
pub use expr::{Bindings, Expr};
pub use multi_index::MultiIndex;
pub use parse::{parse, parse_jet_ref, parse_with_sugar, FuncSugar};
pub use poly::{Mono, Poly};

pub use num::BigRational;
