//! Error taxonomy shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating a scenario.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A quantity constructor rejected its argument.
    #[error("invalid {quantity}: {value} ({reason})")]
    InvalidQuantity {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An operation was evaluated outside its mathematical domain.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// An exact division by zero was requested.
    #[error("division by zero in {op}: {detail}")]
    DivideByZero { op: &'static str, detail: &'static str },

    /// A pulse sequence the trajectory builder does not model.
    #[error("unsupported pulse sequence: {0}")]
    UnsupportedSequence(String),

    /// A query time outside the trajectory span.
    #[error("time {t} s outside trajectory span [{start}, {end}] s")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },

    /// An invalid run configuration (bad grid, step count, scan layout, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The least-squares fit did not converge within the iteration budget.
    #[error("fit failed to converge after {iterations} iterations (last step {last_step:e} rad)")]
    FitFailure { iterations: usize, last_step: f64 },

    /// The supplied data cannot determine the requested parameter.
    #[error("parameter is unidentifiable: {0}")]
    Unidentifiable(String),

    /// Sampling too coarse to resolve the requested structure.
    #[error("insufficient resolution: {0}")]
    Resolution(String),
}
