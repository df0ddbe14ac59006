use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("scaling vector has a zero entry at index {0}")]
    ZeroScaling(usize),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("theta coordinate {0} is zero but a negative exponent requires division")]
    ZeroTheta(usize),

    #[error("data vector sums to zero")]
    ZeroDataSum,

    #[error("probability vector has a non-positive entry at index {0}")]
    NonPositiveP(usize),

    #[error("solver requires a strictly positive scaling (entry {0} is not > 0)")]
    InvalidScaling(usize),

    #[error("iterative scaling did not reach residual {epsilon} within {iterations} iterations (last residual {residual}); data may lie on the boundary of the marginal cone")]
    NotConverged {
        iterations: usize,
        epsilon: f64,
        residual: f64,
    },

    #[error("point is not on the model: log-system residual {0} exceeds tolerance {1}")]
    OffModel(f64, f64),

    #[error("homotopy endpoints have different exponent matrices")]
    ModelMismatch,

    #[error("Jacobian is singular at t = {0}")]
    SingularJacobian(f64),

    #[error(
        "Newton corrector diverged at t = {t} after {iterations} iterations (residual {residual})"
    )]
    CorrectorDiverged {
        t: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("step size fell below {min_step} at t = {t}")]
    StepUnderflow { t: f64, min_step: f64 },

    #[error("tracked point left the positive orthant at t = {0}")]
    PositivityLost(f64),

    #[error("the zero polynomial has no root count")]
    ZeroPolynomial,

    #[error("model is not a hypersurface: n = {n} but d + 1 = {d_plus_1}")]
    NotHypersurface { n: usize, d_plus_1: usize },

    #[error("kernel does not have rank one")]
    KernelDimension,

    #[error("kernel vector has zero entries (matrix not in general position); the binomial discriminant formula does not apply")]
    NotGeneralPosition,

    #[error("closed-form start point failed to polish (birch residual {0})")]
    StartInvalid(f64),

    #[error("row reduction did not produce a full-rank basis")]
    RankReductionFailed,

    #[error("operation requires an exact rational scaling, but the model only carries floats")]
    ExactScalingRequired,

    #[error("solvers disagree on cell d-1 = {d_minus_1}, k = {k}: residual {residual}")]
    SolverDisagreement {
        d_minus_1: usize,
        k: usize,
        residual: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("could not parse {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
