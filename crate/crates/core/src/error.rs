use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to decode {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported image format for {path}")]
    UnsupportedFormat { path: PathBuf },

    #[error("degenerate contour: {0}")]
    DegenerateContour(&'static str),

    #[error("degenerate hull: all points collinear or fewer than 3 distinct points")]
    DegenerateHull,

    #[error("degenerate region: {0}")]
    DegenerateRegion(&'static str),

    #[error("contour is thinner than one {cell_size}px cell; no minimum perimeter polygon band")]
    DegenerateBand { cell_size: usize },

    #[error("mask contains no foreground region")]
    NoRegion,

    #[error("mask {stem}: no paired {expected}")]
    MissingPair { stem: String, expected: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("label table {path}: missing header `{header}`")]
    MissingHeader { path: PathBuf, header: &'static str },

    #[error("label table {path}: cell_id {cell_id}: {message}")]
    InvalidLabel { path: PathBuf, cell_id: String, message: String },

    #[error("label table {path}: duplicate cell_id {cell_id}")]
    DuplicateCellId { path: PathBuf, cell_id: u32 },

    #[error(
        "label table does not cover the mask: regions without a row {unlabeled:?}, rows without a region {unmatched:?}"
    )]
    MissingLabels { unlabeled: Vec<u32>, unmatched: Vec<u32> },

    #[error("NIfTI format error: {0}")]
    NiftiFormat(String),

    #[error("unsupported NIfTI datatype code {0} (supported: 2, 4, 512)")]
    UnsupportedDtype(i16),

    #[error("dimension mismatch: mask is {mask_w}x{mask_h}, volume is {vol_w}x{vol_h}")]
    DimensionMismatch { mask_w: usize, mask_h: usize, vol_w: usize, vol_h: usize },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("image encoding error: {0}")]
    Image(#[from] image::ImageError),

    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
