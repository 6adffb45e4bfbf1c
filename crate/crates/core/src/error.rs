use thiserror::Error;

use crate::encoding::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("slot count mismatch: {0} vs {1}")]
    SlotMismatch(usize, usize),
    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),
    #[error("cannot parse Pauli string {text:?}: {reason}")]
    ParsePauli { text: String, reason: String },
    #[error("slot {slot} out of range for {n_slots} slots")]
    SlotOutOfRange { slot: usize, n_slots: usize },
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("cell ({0}, {1}) lies outside the 3x3 window")]
    OutsideWindow(i32, i32),
    #[error("no edge joins {0} and {1}")]
    MissingEdge(String, String),
    #[error("path must be closed (first vertex equal to last)")]
    OpenPath,
    #[error("path needs at least two vertices")]
    ShortPath,
    #[error("site hosts only one spin mode; on-site term needs both")]
    MissingSpinMode,
    #[error("encoding failed validation with {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("invalid Clifford gate: {0}")]
    Gate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("document error: {0}")]
    Document(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
