use std::ops::Range;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_um} µm outside model range [{min_um}, {max_um}] µm")]
    OutOfRange {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coefficient file: {0}")]
    Coefficients(String),

    #[error("HITRAN record has {0} characters, expected 160")]
    RecordLength(usize),

    #[error("HITRAN field `{field}` at columns {}-{}: cannot parse {text:?}", .columns.start + 1, .columns.end)]
    RecordField {
        field: &'static str,
        columns: Range<usize>,
        text: String,
    },

    #[error("line list: {0}")]
    LineList(String),

    #[error("line list row {row}: {message}")]
    LineListRow { row: usize, message: String },

    #[error("grid: {0}")]
    Grid(String),

    #[error("map file: {0}")]
    MapFormat(String),

    #[error("incompatible data: {0}")]
    Incompatible(String),

    #[error("visibility: {0}")]
    Visibility(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
