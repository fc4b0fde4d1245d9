use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate multi-index {0:?}: repeated axis label")]
    DegenerateMultiIndex(Vec<usize>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("incompatible domains: {0}")]
    IncompatibleDomains(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-invertible Jacobian at {point:?} (det = {det:e})")]
    SingularJacobian { point: Vec<f64>, det: f64 },
    #[error("evaluation at the origin where |x|^-1 is required")]
    Origin,
    #[error("order n = {n} exceeds the supported maximum {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("bracket exhaustion: found {found} of {wanted} zeros below x = {limit}")]
    BracketExhausted { found: usize, wanted: usize, limit: f64 },
    #[error("requested {requested} modes but only {available} are available")]
    TooManyModes { requested: usize, available: usize },
    #[error("grid too large: {cells} unknowns exceeds the limit {limit}")]
    GridTooLarge { cells: usize, limit: usize },
    #[error("mesh too coarse: {interior} interior nodes for {arcs} arcs")]
    MeshTooCoarse { interior: usize, arcs: usize },
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether the error reports bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMultiIndex(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::OrderTooLarge { .. }
                | Error::TooManyModes { .. }
                | Error::GridTooLarge { .. }
                | Error::MeshTooCoarse { .. }
        )
    }
}
