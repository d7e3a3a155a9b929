use core::fmt;

/// Errors surfaced by configuration validation, precoder construction and the
/// analytic layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// A count parameter (RUs, antennas, users, trials) is zero.
    NonPositiveParameter(&'static str),
    /// Fewer than 2 Monte Carlo trials; the sample variance is undefined.
    TrialsTooFew,
    /// Matrix dimensions are incompatible (e.g. K > M for ZF).
    DimensionError,
    /// The Gram matrix HH* is numerically singular (condition estimate
    /// above 1e12).
    SingularChannel,
    /// A precoder column has zero norm and cannot be vector-normalized.
    ZeroColumn,
    /// The whole precoding matrix is zero.
    ZeroMatrix,
    /// A closed-form expression was evaluated outside its domain
    /// (K >= M for the Wishart mean, negative discriminant, ...).
    DomainError,
    /// Gradient comparison requested where no crossing point exists.
    NoCrossPoint,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveParameter(name) => write!(f, "parameter `{name}` must be positive"),
            Error::TrialsTooFew => write!(f, "at least 2 trials are required"),
            Error::DimensionError => write!(f, "incompatible dimensions"),
            Error::SingularChannel => write!(f, "channel Gram matrix is numerically singular"),
            Error::ZeroColumn => write!(f, "precoder column has zero norm"),
            Error::ZeroMatrix => write!(f, "precoding matrix is zero"),
            Error::DomainError => write!(f, "expression evaluated outside its domain"),
            Error::NoCrossPoint => write!(f, "no crossing point exists for these parameters"),
        }
    }
}
