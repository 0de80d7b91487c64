use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown frontier `{0}`")]
    UnknownFrontier(String),
    #[error("invalid frontier `{id}`: {reason}")]
    InvalidFrontier { id: String, reason: String },
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error("kernel `{kernel}` does not support this operation: {reason}")]
    UnsupportedKernel { kernel: &'static str, reason: &'static str },
    #[error("quadrature did not converge for {what} (estimated error {error:e})")]
    Quadrature { what: String, error: f64 },
    #[error("rejection sampler for frontier `{0}` exceeded its proposal budget")]
    PathologicalFrontier(String),
    #[error("cell index {index} out of range 1..={cells}")]
    CellOutOfRange { index: usize, cells: usize },
    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
