use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("defined atom `{atom}` has no derivative rule for `{var}`")]
    MissingDerivativeRule { atom: String, var: String },
    #[error("constraint for {lead} is not in solved form: {why}")]
    NotSolvedForm { lead: String, why: String },
    #[error("inconsistent constraint set: {lead} has conflicting right-hand sides")]
    Inconsistent { lead: String },
    #[error("reduction order cap exceeded (ranking violation?)")]
    OrderCap,
    #[error("constraint on a function symbol must apply it to distinct independent variables")]
    BadFuncConstraintArgs,
    #[error(transparent)]
    Expr(#[from] expr_core::ExprError),
}
