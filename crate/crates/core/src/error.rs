use thiserror::Error;

/// Errors shared by every engine in the crate.
///
/// The CLI maps these onto its stable exit codes: input problems
/// (`Parse`, `InvalidInput`, `SizeMismatch`, `NoDiversity`) are exit 2,
/// resource problems (`CapExceeded`, `BudgetExceeded`, `Overflow`) are exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size mismatch: |A| = {left}, |B| = {right}")]
    SizeMismatch { left: u64, right: u64 },

    #[error("multiset has a single distinct value (M = 0)")]
    NoDiversity,

    #[error("{engine} supports n <= {cap}, got n = {n}; {hint}")]
    CapExceeded {
        engine: &'static str,
        n: u64,
        cap: u64,
        hint: &'static str,
    },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("integer overflow guard: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
