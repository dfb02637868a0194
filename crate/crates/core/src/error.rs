use thiserror::Error;

/// Errors raised by the simulation, decoding and experiment layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: {left} qubits vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("site {site} out of range for {n} qubits (sites are 1-based)")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("observable is not Hermitian (phase must be +1 or -1)")]
    NonHermitian,

    #[error("cannot parse Pauli word {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported schedule: {0}")]
    UnsupportedSchedule(String),

    #[error("frame invariant violated: {0}")]
    BrokenFrame(String),

    #[error("syndrome is consistent with several errors: {}", .candidates.join(", "))]
    Ambiguous { candidates: Vec<String> },

    #[error("syndrome detected but matches no correctable error")]
    Uncorrectable,

    #[error("decoding tie: both candidate corrections have weight {weight}")]
    DecodeTie { weight: usize },

    #[error("state of {n} qubits exceeds the dense oracle limit of {max}")]
    TooManyQubits { n: usize, max: usize },
}

impl Error {
    /// True for decoder outcomes that are not configuration mistakes.
    pub fn is_decode_failure(&self) -> bool {
        matches!(
            self,
            Error::Ambiguous { .. } | Error::Uncorrectable | Error::DecodeTie { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_site(site: usize, n: usize) -> Result<usize> {
    if site == 0 || site > n {
        Err(Error::SiteOutOfRange { site, n })
    } else {
        Ok(site - 1)
    }
}
