use alloc::string::String;

use crate::arith::Q;

/// Failure modes of the calculus. Every variant that reports a valuation
/// carries it as an exact rational.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("element is not a unit")]
    NonUnit,
    #[error("zero residue has no Teichmueller lift")]
    ZeroResidue,
    #[error("argument outside the convergence domain: {0}")]
    ConvergenceDomain(String),
    #[error("operation produced an empty window")]
    EmptyWindow,
    #[error("inner series has a nonvanishing constant term")]
    NonvanishingConstantTerm,
    #[error("linear coefficient is not a unit")]
    NonUnitLinearTerm,
    #[error("no Weierstrass degree inside the window")]
    NoWeierstrassDegree,
    #[error("not divisible: residual valuation {residual}")]
    NotDivisible { residual: Q },
    #[error("pivot at degree {degree} has valuation {valuation}, exhausting precision")]
    PivotLoss { degree: usize, valuation: Q },
    #[error("limit did not stabilise: {0}")]
    StabilizationFailure(String),
    #[error("successive approximation stalled: {0}")]
    SolverStall(String),
    #[error("coefficient of degree {degree} is not integral")]
    IntegralityViolation { degree: i64 },
    #[error("no solution at the requested precision: {0}")]
    NoSolution(String),
    #[error("operator is not topologically nilpotent (gap {gap})")]
    NotNilpotent { gap: Q },
    #[error("interior sub-window is empty")]
    EmptyInterior,
    #[error("inconclusive at window boundary (slack {slack})")]
    InconclusiveAtBoundary { slack: Q },
    #[error("interval overlap condition violated")]
    IntervalOverlapViolation,
    #[error("torsion subgroup does not split off (e >= p - 1)")]
    TorsionNotSplit,
    #[error("phi-matrix determinant is not a unit")]
    NonUnitDet,
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("chain map violation: {0}")]
    ChainMapViolation(String),
    #[error("certificate not found: {0}")]
    CertificateNotFound(String),
    #[error("homotopy identity violated: {0}")]
    HomotopyViolation(String),
    #[error("group order divisible by p")]
    OrderNotInvertible,
    #[error("pair is not a cocycle (residual valuation {residual})")]
    NotACocycle { residual: Q },
    #[error("residual too large: valuation {residual}")]
    ResidualTooLarge { residual: Q },
    #[error("base change mismatch: {0}")]
    MismatchWitness(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
