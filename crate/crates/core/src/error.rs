use thiserror::Error;

/// Errors raised by metric evaluation, selection and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown node id {0}")]
    UnknownNode(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("grounded Laplacian is singular: a follower component contains no input")]
    SingularLaplacian,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("system matrix is not Hurwitz; use the finite-horizon Gramian")]
    NotHurwitz,
    #[error("controllability Gramian is singular (uncontrollable pair)")]
    GramianSingular,
    #[error("node {0} is an input node")]
    InputNode(usize),
    #[error("random walk exceeded the step cap of {0} steps")]
    WalkStepCap(u64),
    #[error("target {target} is infeasible: best achievable value is {best}")]
    InfeasibleTarget { target: f64, best: f64 },
    #[error("constraint {index} is infeasible: target {target}, best achievable {best}")]
    InfeasibleConstraint { index: usize, target: f64, best: f64 },
    #[error("budget k={k} cannot achieve structural controllability (needs at least {needed})")]
    InfeasibleK { k: usize, needed: usize },
    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),
    #[error("matroid axiom violated: {0}")]
    MatroidAxiom(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
