use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Conditioning on a detector click whose probability is (numerically)
    /// zero, e.g. photon subtraction from the vacuum.
    #[error("conditioning on a zero-probability click event")]
    ZeroProbabilityConditioning,

    #[error("quasiprobability kind mismatch: expected {expected}, got {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// A Gaussian atom left the closed transform class (linear term combined
    /// with a non-constant polynomial prefactor).
    #[error("Gaussian atom is outside the closed Fourier-transform class")]
    UnrepresentableAtom,

    #[error("Fock cutoff {cutoff} too small: tail mass {tail_mass:.3e} exceeds {limit:.3e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail_mass: f64,
        limit: f64,
    },

    #[error("displacement |z|^2 = {z_sqr:.3} violates cutoff guard (cutoff {cutoff})")]
    DisplacementGuard { z_sqr: f64, cutoff: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("optimizer failed to converge on any start")]
    NonConvergence,

    #[error("quadrature did not converge: achieved error estimate {0:.3e}")]
    QuadratureNonConvergence(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown figure or variant: {0}")]
    UnknownFigure(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::UnknownFigure(_) | Error::Io { .. } => 2,
            Error::NonConvergence => 4,
            _ => 3,
        }
    }
}
