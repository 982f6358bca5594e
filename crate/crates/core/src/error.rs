use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("crop region does not intersect the canvas")]
    EmptyCrop,

    #[error("query region does not intersect the mask")]
    EmptyRegion,

    #[error("histogram has no pixels")]
    EmptyHistogram,

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, found {found_w}x{found_h}")]
    DimensionMismatch {
        expected_w: u32,
        expected_h: u32,
        found_w: u32,
        found_h: u32,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("malformed bounds attribute: {raw:?}")]
    BoundsFormat { raw: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("recipe does not fit the canvas: {0}")]
    Recipe(String),

    #[error("injection infeasible: {0}")]
    InjectionInfeasible(String),

    #[error("corpus constraints unsatisfiable: {0}")]
    Corpus(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
