use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid molecule specification: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not orthogonal (residual {residual:.3e})")]
    NotOrthogonal { residual: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("nuclei {0} and {1} coincide")]
    Degenerate(usize, usize),

    #[error("missing model coefficient for species pair {0}-{1}")]
    MissingCoefficient(String, String),

    #[error("invalid model coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("optimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
        last: Vec<[f64; 3]>,
    },

    #[error("optimizer path collapsed toward coincident nuclei")]
    DegeneratePath,

    #[error("configuration is not stationary (gradient norm {0:.3e})")]
    NotStationary(f64),

    #[error("configuration is not a minimum: {0}")]
    NotAMinimum(String),

    #[error("configuration is not centered (center of mass at distance {0:.3e})")]
    NotCentered(f64),

    #[error("ambiguous nucleus matching: image of nucleus {0} lies within tolerance of several nuclei")]
    AmbiguousMatch(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unit error: {0}")]
    Units(String),

    #[error("parse error: {0}")]
    Parse(String),
}
