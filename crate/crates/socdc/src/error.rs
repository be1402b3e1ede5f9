use thiserror::Error;

use crate::conditions::ConditionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("input contains a non-finite entry")]
    NonFinite,

    #[error("invalid cone data: {0}")]
    InvalidCone(String),

    #[error("inertia ({neg} neg, {zero} zero, {pos} pos) does not describe an SOC-representable cone")]
    WrongInertia { neg: usize, zero: usize, pos: usize },

    #[error("base matrix of the pencil is numerically singular")]
    SingularPencil,

    #[error("eigenvalue iteration did not converge")]
    EigenFailure,

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("no epsilon in 2^-4..2^-40 makes the shifted base nonsingular with one negative eigenvalue")]
    EpsilonLadderExhausted,

    #[error("cut generation stopped: {kind}")]
    Gate {
        kind: GateFailure,
        report: Box<ConditionReport>,
    },

    #[error("invalid decomposition witness: d^T A1 d = {0} is not negative")]
    InvalidWitness(f64),

    #[error("decomposition endpoint lies outside the plus branch (b0^T x = {0})")]
    EndpointOutsideCone(f64),

    #[error("sampling found {found} of {wanted} points in the requested set")]
    EmptySet { found: usize, wanted: usize },

    #[error("domain: {0}")]
    Domain(String),

    #[error("{0}")]
    Socp(String),

    #[error("input: {0}")]
    Input(String),
}

/// Why `build_cut` refused to emit a cut.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateFailure {
    #[error("A0 does not have exactly one negative and at least one positive eigenvalue")]
    Cond1Failed,
    #[error("no common interior direction (lambda_min(A_t*) = {lambda_min:.3e} >= 0 at t* = {t_star})")]
    Cond2Infeasible { t_star: f64, lambda_min: f64 },
    #[error("interior point search exhausted its budget without a dual certificate")]
    Cond2Indeterminate,
    #[error("A1 is neither positive nor negative definite on Null(A0)")]
    Cond3Failed,
    #[error("degenerate numerics: {0}")]
    DegenerateNumerics(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "Dimension",
            Error::NonFinite => "NonFinite",
            Error::InvalidCone(_) => "InvalidCone",
            Error::WrongInertia { .. } => "WrongInertia",
            Error::SingularPencil => "SingularPencil",
            Error::EigenFailure => "EigenFailure",
            Error::Precondition(_) => "PreconditionUnmet",
            Error::EpsilonLadderExhausted => "EpsilonLadderExhausted",
            Error::Gate { kind, .. } => match kind {
                GateFailure::Cond1Failed => "Cond1Failed",
                GateFailure::Cond2Infeasible { .. } => "Cond2Infeasible",
                GateFailure::Cond2Indeterminate => "Cond2Indeterminate",
                GateFailure::Cond3Failed => "Cond3Failed",
                GateFailure::DegenerateNumerics(_) => "DegenerateNumerics",
            },
            Error::InvalidWitness(_) => "InvalidWitness",
            Error::EndpointOutsideCone(_) => "EndpointOutsideCone",
            Error::EmptySet { .. } => "EmptySet",
            Error::Domain(_) => "Domain",
            Error::Socp(_) => "SocpFailure",
            Error::Input(_) => "Input",
        }
    }

    pub fn gate(&self) -> Option<&GateFailure> {
        match self {
            Error::Gate { kind, .. } => Some(kind),
            _ => None,
        }
    }
}
