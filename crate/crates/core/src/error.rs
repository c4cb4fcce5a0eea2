use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("row {row} of the transition matrix is not a probability vector: {reason}")]
    NotStochastic { row: usize, reason: String },

    #[error("no one-step minorization on the chosen small set (epsilon = 0)")]
    NoMinorization,

    #[error("minorization violated at x = {x}, y = {y}: eps*nu(y) = {lhs} > p(x, y) = {rhs}")]
    MinorizationViolation {
        x: String,
        y: String,
        lhs: f64,
        rhs: f64,
    },

    #[error("degenerate: chain regenerates every step (epsilon = 1), the residual kernel is undefined")]
    DegenerateResidual,

    #[error("{0} requires transition and minorizing densities")]
    DensityUnavailable(&'static str),

    #[error("internal inconsistency: sampler produced y = {y} from x = {x} where the density is zero")]
    InconsistentDensity { x: String, y: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("tour exceeded the cap of {cap} steps")]
    TourOverflow { cap: usize },

    #[error("{what}: cap of {cap} attempts exhausted (empirical acceptance rate {acceptance_rate:.3e})")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        acceptance_rate: f64,
    },

    #[error("transition matrix is reducible: state {0} cannot reach every other state")]
    Reducible(usize),

    #[error("atom looks inaccessible: regeneration-time tail did not vanish by t = {0}")]
    AtomInaccessible(usize),

    #[error("tau < {0} almost surely, Q_t is undefined")]
    ZeroMass(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state label {0} is outside the state space")]
    UnknownLabel(usize),

    #[error("bound hypotheses violated: {0}")]
    BoundHypothesis(String),

    #[error("invalid beta = {beta}: {reason}; shrink beta toward 1")]
    InvalidBeta { beta: f64, reason: String },

    #[error("V does not witness geometric drift for this C (lambda = {0} >= 1)")]
    NoDrift(f64),

    #[error("truncation level M = {m:.3e} exceeds the cap {cap}; try a different beta or a larger gamma")]
    TruncationTooLarge { m: f64, cap: u64 },

    #[error("every beta on the selection grid is invalid: {}", .0.join("; "))]
    NoValidBeta(Vec<String>),

    #[error("model spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for validation failures, 3 for cap/overflow
    /// diagnostics, 1 for anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::TourOverflow { .. }
            | Error::CapExceeded { .. }
            | Error::AtomInaccessible(_)
            | Error::TruncationTooLarge { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
