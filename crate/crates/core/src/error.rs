use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A tick arrived out of order.
    #[error("ordering error: expected tick {expected}, got {got}")]
    Ordering { expected: u64, got: u64 },
    /// A numeric argument outside its valid range.
    #[error("domain error: {0}")]
    Domain(String),
    /// A named configuration parameter outside its documented range.
    #[error("parameter `{key}` must be {expected}")]
    Param { key: &'static str, expected: &'static str },
    /// Data does not match the declared outcome or action schema.
    #[error("schema error: {0}")]
    Schema(String),
    /// A model was queried before it holds any data.
    #[error("model unavailable: {0}")]
    Unavailable(&'static str),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }
}
