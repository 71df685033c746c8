use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("node count must be at least 1")]
    NoNodes,

    #[error("p + q = 0: the Home/Non-Home chain is reducible and has no unique stationary law")]
    DegenerateChain,

    #[error("expected {expected} edge states, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("node {node} is out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error(
        "p*alpha + q*gamma = 0: the link never makes contact, inter-contact time is undefined"
    )]
    NoContacts,

    #[error("only {observed} inter-contact gaps observed, need at least {required}")]
    InsufficientData { observed: usize, required: usize },

    #[error("coupling inapplicable: {0}")]
    CouplingInapplicable(String),

    #[error("p*alpha = 0: Lambda = 4(p+q)/(p*alpha) is undefined")]
    LambdaUndefined,

    #[error(
        "phase schedule inapplicable: ceil(5*Lambda/n) = {lhs} > min(1/alpha, 1/(4q)) = {rhs}"
    )]
    ScheduleInapplicable { lhs: f64, rhs: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("exact oracle supports at most {max} nodes, got {n}")]
    Capacity { n: usize, max: usize },

    #[error("trace `{trace}` row {row}: {reason}")]
    InvalidTrace {
        trace: String,
        row: usize,
        reason: String,
    },

    #[error("trace has {got} points, fitting needs at least {required}")]
    TooFewPoints { got: usize, required: usize },

    #[error("every evaluation of the fit objective was infeasible")]
    FitFailed,

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
