use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invariance condition violated: {0}")]
    InvarianceViolated(String),
    #[error("parameter slots do not match kind {0}")]
    BadParamShape(String),
    #[error("t = {0} is a pole of the Hamiltonian")]
    PoleAtT(String),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("gauge difference is not a multiple of the identity: {0}")]
    GaugeNotScalar(String),
    #[error("result leaves the tracked weight space: {0}")]
    NotInSpan(String),
    #[error("integration interval crosses the singularity at {0}")]
    SingularityInInterval(String),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(String),
    #[error("coupling entry vanishes identically")]
    EliminationSingular,
    #[error("u = {0} is a singular point of the master function")]
    SingularPoint(String),
    #[error("no convergent default contour: {0}")]
    NoConvergentContour(String),
    #[error("quadrature not converged: estimated error {0:e}")]
    NotConverged(f64),
    #[error("quadrature budget exceeded: {needed} evaluations > {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
