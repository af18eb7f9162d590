use alloc::string::String;

/// Errors reported by the distance engines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter or input violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The request is well formed but exceeds the numeric range the engine
    /// can represent exactly.
    #[error("out of range: {0}")]
    Range(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! out_of_range {
    ($($arg:tt)*) => {
        $crate::error::Error::Range(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid;
pub(crate) use out_of_range;
