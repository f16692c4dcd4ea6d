use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// ψ and the E-reconstruction only exist for γ > 1.
    #[error("operation requires gamma > 1, got {0}")]
    UnsupportedGamma(f64),

    #[error("no positive hydrostatic equilibrium between cells {cell} and {next}", next = cell + 1)]
    NoEquilibrium { cell: usize },

    /// A single step produced NaN or infinity in the given (interior) cell.
    #[error("non-finite value produced in cell {cell}")]
    NonFinite { cell: usize },

    /// A time loop hit a non-finite state.
    #[error("blow-up at step {step} (t = {time:.6e})")]
    BlowUp { step: usize, time: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
