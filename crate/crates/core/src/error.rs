use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is not regular: {0}")]
    NonRegularCurve(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("normal ray from inner curve at u = {u} never meets the outer curve")]
    RayEscapes { u: f64 },
    #[error("normal ray from inner curve at u = {u} grazes the outer curve")]
    DegenerateRay { u: f64 },
    #[error("annulus is not starlike with respect to its inner curve")]
    NotStarlike,
    #[error("annulus is not strictly starlike (m = {m})")]
    NotStrictlyStarlike { m: f64 },
    #[error("loop is not closed (end point differs from start by {gap})")]
    NotClosedLoop { gap: f64 },
    #[error("one-form is not closed: defect {defect} exceeds {tol}")]
    NotClosed { defect: f64, tol: f64 },
    #[error("bad metric profile: {0}")]
    BadMetricProfile(String),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("bad mask: {0}")]
    BadMask(String),
    #[error("subdomain is not simply connected (Euler characteristic {euler})")]
    NotSimplyConnected { euler: i64 },
    #[error("thin region under-resolved: {cells:.2} cells across, need at least {required}")]
    ThinDomainUnderresolved { cells: f64, required: usize },
    #[error("Rayleigh quotient of the zero vector")]
    ZeroVector,
    #[error("bad operator: {0}")]
    BadOperator(String),
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("eigensolver stalled after {iterations} iterations: {converged}/{wanted} converged, worst residual {worst_residual:e}")]
    SolverStalled {
        iterations: usize,
        converged: usize,
        wanted: usize,
        worst_residual: f64,
    },
    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}
