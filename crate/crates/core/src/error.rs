use thiserror::Error;

/// Errors produced by the library. `Guard` marks refusals (a request that is
/// well-formed but outside configured feasibility limits), which the CLI maps
/// to a distinct exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parse error at line {line}{}: {msg}", col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        col: Option<usize>,
        msg: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("refused: {0}")]
    Guard(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col: None,
            msg: msg.into(),
        }
    }

    pub fn parse_at(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col: Some(col),
            msg: msg.into(),
        }
    }

    /// Machine-readable category used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Parse { .. } => "parse",
            Error::Precondition(_) => "precondition",
            Error::Guard(_) => "guard",
            Error::Numerical(_) => "numerical",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
