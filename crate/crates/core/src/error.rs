use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),
    #[error("clique size n must be at least 2, got {0}")]
    CliqueTooSmall(u32),
    #[error("n-ad free-edge distribution starts at {support_min}, below the bundle count mu = {mu}")]
    BundlesExceedFreeEdges { mu: u32, support_min: u32 },
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("probability at degree {k} is invalid: {value}")]
    InvalidProbability { k: u32, value: f64 },
    #[error("degree {0} listed more than once")]
    DuplicateDegree(u32),
    #[error("distribution sums to {sum}, not 1")]
    Unnormalized { sum: f64 },
    #[error("preference weight at degree {k} must be positive and finite, got {value}")]
    InvalidWeight { k: u32, value: f64 },
    #[error("invalid preference function: {0}")]
    InvalidPreference(String),

    #[error("seed graph needs at least 2 vertices, got {0}")]
    SeedTooSmall(u32),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("edge ({0}, {1}) is a self-loop or references a missing vertex")]
    InvalidEdge(u32, u32),
    #[error("no attachable vertex: every degree lies outside the preference support")]
    Saturated,

    #[error("mean preference must be positive and finite, got {0}")]
    InvalidMeanPreference(f64),
    #[error("k_max = {k_max} is below the largest increment degree {required}")]
    KMaxTooSmall { k_max: u32, required: u32 },
    #[error("negative layer mass {value} at degree {k}")]
    NegativeMass { k: u32, value: f64 },
    #[error("mean-preference fixed point not found after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("no positive mean preference reproduces itself: the attachable layers drain")]
    NoFixedPoint,

    #[error("normalizer a = {0} is not positive")]
    NonPositiveNormalizer(f64),
    #[error("target distribution has zero mass at interior degree {0}")]
    ZeroTargetMass(u32),

    #[error("need at least 3 positive points in the fitting window, got {0}")]
    InsufficientPoints(usize),
    #[error("graph has no wedges; clustering is undefined")]
    NoWedges,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when valid inputs lead the model itself to fail: saturation, an
    /// infeasible preference, a stationary state that does not exist or was
    /// not found. Everything else is a problem with the inputs.
    pub fn is_model_failure(&self) -> bool {
        matches!(
            self,
            Error::Saturated
                | Error::InvalidWeight { .. }
                | Error::NegativeMass { .. }
                | Error::NonConvergence { .. }
                | Error::NoFixedPoint
                | Error::NonPositiveNormalizer(_)
                | Error::InsufficientPoints(_)
                | Error::NoWedges
        )
    }
}
