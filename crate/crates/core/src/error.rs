use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("separation undefined: need at least 2 points, got {0}")]
    SeparationUndefined(usize),

    #[error("empty domain box")]
    EmptyDomain,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),

    #[error("NaN in profile at t = {0}")]
    NotANumber(f64),

    #[error("increase truncation: tail estimate {tail:e} exceeds tolerance {tol:e} at t = {t}")]
    Truncation { t: f64, tail: f64, tol: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("increase pad: boundary magnitude {boundary:e} exceeds {limit:e}")]
    IncreasePad { boundary: f64, limit: f64 },

    #[error("refine grid: frequency {freq} beyond grid Nyquist {nyquist}")]
    RefineGrid { freq: f64, nyquist: f64 },

    #[error(
        "grid budget exceeded: {nodes} nodes > {budget}; try spacing >= {suggested_spacing:e}"
    )]
    GridBudget {
        nodes: usize,
        budget: usize,
        suggested_spacing: f64,
    },

    #[error("dominance not reached after {steps} dyadic steps (last ratio {last_ratio:e} at sigma {sigma})")]
    DominanceNotReached {
        steps: u32,
        last_ratio: f64,
        sigma: f64,
    },

    #[error("matrix singular to working precision")]
    Singular,

    #[error("least squares failed: {0}")]
    LeastSquares(String),

    #[error("fit needs at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("level {level}: {source}")]
    AtLevel { level: usize, source: Box<Error> },
}

impl Error {
    pub fn at_level(self, level: usize) -> Self {
        Error::AtLevel {
            level,
            source: Box::new(self),
        }
    }
}
