use thiserror::Error;

/// Which side of the sample a microphone pair sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MicPair {
    Upstream,
    Downstream,
}

impl std::fmt::Display for MicPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MicPair::Upstream => f.write_str("upstream"),
            MicPair::Downstream => f.write_str("downstream"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("frequency grids differ ({left} vs {right} bins)")]
    GridMismatch { left: usize, right: usize },

    #[error("{pair} microphone pair is singular at {frequency_hz} Hz (|sin kΔx| = {sin_value:.3e})")]
    SingularSpacing {
        pair: MicPair,
        frequency_hz: f64,
        sin_value: f64,
    },

    #[error("one-load closure is singular (|P0·Vd + Pd·V0| = {denominator:.3e})")]
    ClosureSingular { denominator: f64 },

    #[error("band sets differ: {0}")]
    BandMismatch(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("no valid frequency bins: {0}")]
    NoValidBins(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification used by front ends to choose an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::SingularSpacing { .. } | Error::ClosureSingular { .. } | Error::NoValidBins(_) => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Input,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
