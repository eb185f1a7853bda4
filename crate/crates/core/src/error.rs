use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("read of degree {degree} below trusted degree {trusted_lo}")]
    BelowTrusted { degree: i32, trusted_lo: i32 },
    #[error("empty trusted window (trusted_lo {trusted_lo} > hi {hi}); increase the truncation depth")]
    EmptyTrustedWindow { trusted_lo: i32, hi: i32 },
    #[error("singular matrix")]
    Singular,
    #[error("series is neither of the form A0(I + N) with N strictly negative nor strictly positive")]
    NotNormalizable,
    #[error("jet variable sets differ")]
    VariableMismatch,
    #[error("exponential needs a zero constant term")]
    NonzeroConstantTerm,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the name of the pipeline stage that produced it.
    pub fn at(self, stage: &str) -> Error {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage: stage.to_string(),
                source: Box::new(other),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
