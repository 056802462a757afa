use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree {0} lies outside the truncation window")]
    DegreeOutsideWindow(i64),
    #[error("index {index} out of range for level {level}")]
    IndexOutOfRange { level: i64, index: usize },
    #[error("kernel is not a direct summand in degree {0}")]
    NonSplitKernel(i64),
    #[error("cokernel has torsion in degree {0}")]
    TorsionCokernel(i64),
    #[error("kernel and cokernel forms disagree in degree {0}")]
    ComparisonFailed(i64),
    #[error("truncation window too small: {0}")]
    WindowTooSmall(String),
    #[error("value {value} out of range 1..={k}")]
    ValueOutOfRange { value: usize, k: usize },
    #[error("bounds exceeded: {0}")]
    BoundsExceeded(String),
    #[error("incompatible inputs: {0}")]
    IncompatibleInputs(String),
    #[error("normalization failure: {0}")]
    NormalizationFailure(String),
    #[error("homology did not stabilize: {0}")]
    NotStabilized(String),
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("infeasible size: {0}")]
    InfeasibleSize(String),
    #[error("disjointness violated: {0}")]
    DisjointnessViolation(String),
    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(String, String),
    #[error("sampling resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
