use alloc::string::String;

/// Errors raised by the core kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("contours undefined without exterior spins")]
    ContoursWithoutExterior,
    #[error("open contour: the fixed boundary ring does not close every interface")]
    OpenContour,
    #[error("path enumeration budget exceeded (max_len {requested} > cap {cap})")]
    PathBudget { requested: usize, cap: usize },
    #[error("missing boundary value at ({x},{y})")]
    MissingBoundary { x: i32, y: i32 },
    #[error("exact enumeration infeasible: {sites} free sites (cap {cap})")]
    EnumerationCap { sites: usize, cap: usize },
    #[error("transfer width {width} exceeds cap {cap}")]
    TransferCap { width: usize, cap: usize },
    #[error("function is not increasing")]
    NotIncreasing,
    #[error("cluster update invalid under constraints")]
    ClusterConstrained,
    #[error("cannot fill {batches} batches with {samples} samples")]
    TooFewSamples { samples: usize, batches: usize },
    #[error("sets F and G overlap")]
    Overlap,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("image volume of {size} sites exceeds cap {cap}")]
    ImageCap { size: usize, cap: usize },
    #[error("set function domain is not closed under subsets")]
    NotSubsetClosed,
    #[error("insufficient points for fit: {have} < {need}")]
    InsufficientPoints { have: usize, need: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fit refused: {0}")]
    FitRefused(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
