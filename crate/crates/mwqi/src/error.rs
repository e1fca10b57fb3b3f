//! Error type shared by the whole library.

/// Library-wide error enumeration.
///
/// Variants are grouped by what the caller can do about them:
/// input problems ([`Domain`](Error::Domain), [`Config`](Error::Config),
/// [`ConfigGeneral`](Error::ConfigGeneral)), model-boundary conditions
/// ([`SingularOperatingPoint`](Error::SingularOperatingPoint),
/// [`UndefinedNormalization`](Error::UndefinedNormalization),
/// [`ImpossibleState`](Error::ImpossibleState),
/// [`DegenerateStatistics`](Error::DegenerateStatistics)), and checks that
/// fire only when an upstream computation produced inconsistent numbers
/// ([`InternalConsistency`](Error::InternalConsistency),
/// [`ContractViolation`](Error::ContractViolation)).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operating point sits on (or within tolerance of) a pole of the
    /// steady-state solution — the dynamical instability boundary.
    #[error("singular operating point: {0}")]
    SingularOperatingPoint(String),

    /// A quantity that must be physical (non-negative variance, uncertainty
    /// principle, quantum bound) came out violated beyond tolerance. This
    /// signals a bug in the caller's inputs or in the library, never a user
    /// mistake.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    /// A per-photon normalization was requested for a state emitting zero
    /// photons.
    #[error("undefined normalization: {0}")]
    UndefinedNormalization(String),

    /// The described state cannot exist (for example nonzero cross
    /// correlation with an empty mode).
    #[error("impossible state: {0}")]
    ImpossibleState(String),

    /// A detection statistic is degenerate (zero denominator in an SNR).
    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    /// A caller-supplied structure broke a stated precondition, such as a
    /// non-commutator-preserving mode map or mismatched transmitter/receiver
    /// designs.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A configuration line failed to parse or used an unknown/duplicate key.
    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    /// A configuration-level problem not tied to one line (missing keys,
    /// unreadable file).
    #[error("config error: {0}")]
    ConfigGeneral(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
