use crate::validator::ValidationReport;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ill-posed division at ({row}, {col}): nonzero entry divided by zero")]
    IllPosedDivision { row: usize, col: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid unit cell: {0}")]
    InvalidCell(String),
    #[error("invalid descriptor set: {0}")]
    InvalidDescriptor(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("degenerate embedding: {0}")]
    DegenerateEmbedding(String),
    #[error("geometry matrix inconsistent with a 3D point set: max residual {residual:e}")]
    InconsistentGeometry { residual: f64 },
    #[error("frame recovery failed: {0}")]
    FrameError(String),
    #[error("node ordering ambiguous: nodes {a} and {b} quantize to the same coordinates")]
    AmbiguousOrdering { a: usize, b: usize },
    #[error("node labeling matches none of the 48 canonical orderings; canonicalize the input first")]
    NonCanonicalLabeling,
    #[error("packing matrix spans {dimension} axes where 3 are required")]
    NotFullyPeriodic { dimension: u8 },
    #[error("corrupt matrix: {0}")]
    CorruptMatrix(String),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("inconsistent tiling: {0}")]
    InconsistentTiling(String),
    #[error("validation failed:\n{0}")]
    Validation(Box<ValidationReport>),
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
