use thiserror::Error;

/// Errors shared across the toolkit.
///
/// Everything here is a *detected* condition, never a numerical guess: digit
/// exhaustion, structural violations, and orbit/singularity events are all
/// decided with exact arithmetic before an error is raised.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// The digit stream ran out before a computation could be certified.
    #[error("insufficient digits: need continued-fraction digits through index {needed}")]
    InsufficientDigits { needed: usize },

    /// A gluing array was not a bijection of the square indices.
    #[error("invalid gluing: {0}")]
    InvalidGluing(String),

    /// The gluings do not act transitively on the squares.
    #[error("disconnected surface")]
    DisconnectedSurface,

    /// Surface or point text that could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Slope outside the open unit interval.
    #[error("slope parameter must lie strictly between 0 and 1")]
    SlopeRange,

    /// Level `k` where the two-gap buffer structure degenerates
    /// (`q_k < 2` or `q_k > q_{k+1} - 2`); callers should increase `k`.
    #[error("degenerate level k={k}: buffer structure undefined, increase k")]
    DegenerateLevel { k: usize },

    /// A requested index was outside its documented range.
    #[error("{what} out of range: {value} not in [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    /// A forward (resp. inverse) application landed exactly on a branch
    /// endpoint of the interval exchange.
    #[error("hits singularity at step {step}: orbit point equals branch endpoint {endpoint}")]
    HitsSingularity { step: usize, endpoint: String },

    /// The traced geodesic passes through a vertex of the surface.
    #[error("geodesic hits a vertex at crossing {step} and becomes undefined")]
    VertexHit { step: usize },

    /// A certificate needs more orbit steps than the configured budget.
    #[error("budget exceeded: certificate requires m* = {required} crossings (budget {budget})")]
    BudgetExceeded { required: u128, budget: u128 },

    /// A precondition that is not a range/degeneracy issue, e.g. an unknown
    /// digit bound for a certificate.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two distinct exact values coincide; only possible for rational slopes.
    #[error("tie between distinct points (rational slope): {0}")]
    RationalTie(String),
}

pub type Result<T> = std::result::Result<T, Error>;
