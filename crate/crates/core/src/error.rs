use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {id} is out of range for a symbol list of size {symbol_count}")]
    SymbolOutOfRange { id: u32, symbol_count: usize },

    #[error("words must contain at least one symbol")]
    EmptyWord,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsatisfiable configuration: {0}")]
    Unsatisfiable(String),

    #[error("{what} exceeded the cap of {cap} attempts")]
    AttemptCapExceeded { what: &'static str, cap: usize },

    #[error("symbol count mismatch: dictionary has {dictionary}, order has {order}")]
    SymbolCountMismatch { dictionary: usize, order: usize },

    #[error("discovery order is not a permutation of the symbol list")]
    NotAPermutation,

    #[error("entropy undefined: the sub-dictionary contains no words")]
    EntropyUndefined,

    #[error("{0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by user-supplied input rather than a failed run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::Unsatisfiable(_)
                | Error::Config(_)
                | Error::Parse { .. }
                | Error::SymbolOutOfRange { .. }
                | Error::EmptyWord
                | Error::Unsupported(_)
        )
    }
}
