use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is too far from Hermitian (relative anti-Hermitian norm {relative:e})")]
    TooFarFromHermitian { relative: f64 },

    #[error("eigen-decomposition did not converge")]
    ConvergenceFailure,

    #[error("unsupported Schatten exponent {0}; expected 1, 2 or infinity")]
    UnsupportedP(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("columns are not orthonormal (Gram error {error:e})")]
    NotOrthonormal { error: f64 },

    #[error("matrix is not an orthogonal projection: {0}")]
    NotProjection(String),

    #[error("matrix is not a quantum coloring: {0}")]
    NotColoring(String),

    #[error("invalid set system: {0}")]
    InvalidSetSystem(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("ground set of size {n} exceeds the cap {cap}")]
    GroundSetTooLarge { n: usize, cap: usize },

    #[error("system needs at least two members, found {0}")]
    DegenerateM(usize),

    #[error("dimension {0} is too small for this operation")]
    DegenerateDim(usize),

    #[error("kernel eigenvalue {value} lies outside [0, 1]")]
    SpectrumOutOfRange { value: f64 },

    #[error("index {index} is outside the ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("numerical breakdown while sampling (residual {residual:e})")]
    NumericalBreakdown { residual: f64 },

    #[error("restriction to the empty set")]
    EmptyRestriction,

    #[error("kernel is invalid: {0}")]
    KernelInvalid(String),

    #[error("projection has rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("deviation t must be positive, got {0}")]
    NonPositiveT(f64),

    #[error("constant condition violated: {0}")]
    ConditionViolated(String),

    #[error("identity check failed: {0}")]
    IdentityViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
