use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `|s| > |t|`: the spectrum is complex and the parameters leave the real-spectrum family.
    #[error("broken PT phase: |s| = {s} exceeds |t| = {t}, eigenvalues are complex")]
    BrokenPhase { s: f64, t: f64 },

    #[error("exceptional point: |s| = |t| = {t}, the Hamiltonian is not diagonalizable")]
    ExceptionalPoint { t: f64 },

    #[error("degenerate evolution: post-evolution trace {0:e} is too small to renormalize")]
    DegenerateEvolution(f64),

    /// A closed-form value disagrees with the numeric evolution beyond the reporting threshold.
    #[error("closed form `{name}` disagrees with numeric path: closed {closed}, numeric {numeric}")]
    ClosedFormMismatch {
        name: &'static str,
        closed: f64,
        numeric: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
