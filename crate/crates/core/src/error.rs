use thiserror::Error;

pub type Result<T, E = ClutterError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ClutterError {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("{width}x{height} field is too small for {levels} pyramid levels")]
    DimensionTooSmall { width: usize, height: usize, levels: usize },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point ({x}, {y}) lies outside the {width}x{height} image")]
    OutOfBounds {
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("region of interest does not intersect the image")]
    EmptyRoi,

    #[error("every pixel in the region of interest is masked")]
    FullyMaskedRoi,

    #[error("input is constant, correlation is undefined")]
    ConstantInput,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("trials line {line}: {message}")]
    TrialParse { line: usize, message: String },

    #[error("rejected trial rows: {}", format_rows(.0))]
    InvalidTrials(Vec<RowIssue>),

    #[error("no image found for id `{0}`")]
    MissingImage(String),

    #[error("malformed CMAP data: {0}")]
    Cmap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A row-level diagnostic from trial ingestion. `line` is 1-based and counts
/// the header as line 1.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RowIssue {
    pub line: usize,
    pub message: String,
}

fn format_rows(rows: &[RowIssue]) -> String {
    rows.iter()
        .map(|r| format!("line {}: {}", r.line, r.message))
        .collect::<Vec<_>>()
        .join("; ")
}

impl ClutterError {
    /// True for failures caused by the filesystem or undecodable inputs,
    /// as opposed to invalid parameters.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            ClutterError::Io(_) | ClutterError::Image(_) | ClutterError::MissingImage(_) | ClutterError::Cmap(_)
        ) || matches!(self, ClutterError::Csv(e) if e.is_io_error())
    }
}
