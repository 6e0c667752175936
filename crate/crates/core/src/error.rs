use thiserror::Error;

/// Errors shared by every layer of the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {r} outside domain [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    #[error("singular point hit at r = {r}")]
    SingularPoint { r: f64 },

    #[error("quadrature tolerance {requested:e} not met (estimated error {achieved:e})")]
    ToleranceNotMet { requested: f64, achieved: f64 },

    #[error("ODE step failure near r = {r}")]
    StepFailure { r: f64 },

    #[error("conformal factor non-positive at r = {r} (f = {value})")]
    NonPositiveFactor { r: f64, value: f64 },

    #[error("tension x vanishes near r = {r}; reduction of order undefined")]
    XVanishes { r: f64 },

    #[error("input map is not biharmonic (bitension sup-norm {sup:e})")]
    NonBiharmonicInput { sup: f64 },

    #[error("unknown case `{0}`")]
    UnknownCase(String),

    #[error("invalid override `{0}`")]
    InvalidOverride(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("monotone inversion failed: {0}")]
    InversionFailure(String),

    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
