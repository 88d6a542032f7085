use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("space of {domain_size}^{arity} assignments exceeds the enumeration cap of {cap}")]
    SpaceTooLarge {
        domain_size: u64,
        arity: usize,
        cap: u64,
    },

    #[error(
        "sampling exhausted after {draws} draws: found {solutions}/{wanted} solutions and \
         {non_solutions}/{wanted} non-solutions"
    )]
    SamplingExhausted {
        draws: u64,
        wanted: usize,
        solutions: usize,
        non_solutions: usize,
    },

    #[error("constraint has no solution: {0}")]
    Unsatisfiable(String),

    #[error("entry {0} has no cost")]
    MissingCost(usize),

    #[error("metric is undefined on an empty space")]
    EmptySpace,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a resource cap (enumeration size, draw budget).
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::SpaceTooLarge { .. } | Error::SamplingExhausted { .. }
        )
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
