use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix is asymmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("diagonal entry ({i}, {i}) is nonzero")]
    NonzeroDiagonal { i: usize },
    #[error("points {i} and {j} coincide (zero off-diagonal distance)")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("negative distance at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("non-finite distance at ({i}, {j})")]
    NonFiniteDistance { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("{count} labels given for {n} points")]
    LabelCountMismatch { count: usize, n: usize },
    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(f64),
    #[error("tolerance must be positive, got {0}")]
    NonpositiveTolerance(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("load vector is not normalized or has nonpositive entries")]
    UnnormalizedLoads,
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("{n} points exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("diameter ratio must be at least 1, got {0}")]
    InvalidRatio(f64),
    #[error("diameter ratio {0} > 2 is only realizable as a semi-metric")]
    RatioNeedsSemiMetric(f64),
    #[error("edge list does not form a tree: {0}")]
    NotATree(String),
    #[error("edge ({u}, {v}) has nonpositive weight")]
    NonpositiveWeight { u: usize, v: usize },
    #[error("simplex of size {size} exceeds the grid limit of {max}")]
    TooLargeSimplex { size: usize, max: usize },
    #[error("grid resolution {0} must lie in (0, 0.25] and divide 1")]
    BadResolution(f64),
    #[error("points {i} and {j} coincide")]
    DuplicatePoints { i: usize, j: usize },
    #[error("at least one trial is required")]
    NoTrials,
}

impl Error {
    /// Variant name, used by the CLI when rendering failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::EmptyMatrix => "EmptyMatrix",
            Error::AsymmetricMatrix { .. } => "AsymmetricMatrix",
            Error::NonzeroDiagonal { .. } => "NonzeroDiagonal",
            Error::ZeroOffDiagonal { .. } => "ZeroOffDiagonal",
            Error::NegativeDistance { .. } => "NegativeDistance",
            Error::NonFiniteDistance { .. } => "NonFiniteDistance",
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::LabelCountMismatch { .. } => "LabelCountMismatch",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::NegativeExponent(_) => "NegativeExponent",
            Error::NonpositiveTolerance(_) => "NonpositiveTolerance",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnnormalizedLoads => "UnnormalizedLoads",
            Error::InvalidSimplex(_) => "InvalidSimplex",
            Error::TooLarge { .. } => "TooLarge",
            Error::InvalidRatio(_) => "InvalidRatio",
            Error::RatioNeedsSemiMetric(_) => "RatioNeedsSemiMetric",
            Error::NotATree(_) => "NotATree",
            Error::NonpositiveWeight { .. } => "NonpositiveWeight",
            Error::TooLargeSimplex { .. } => "TooLargeSimplex",
            Error::BadResolution(_) => "BadResolution",
            Error::DuplicatePoints { .. } => "DuplicatePoints",
            Error::NoTrials => "NoTrials",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
