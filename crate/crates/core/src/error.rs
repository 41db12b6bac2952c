use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no perfect matching exists")]
    InfeasiblePerfect,

    #[error("instance has {n} applicants, enumeration cap is {cap}")]
    InstanceTooLarge { n: usize, cap: usize },

    /// The solver's dual potentials failed the optimality check.
    #[error("solver certificate check failed: {0}")]
    Certificate(String),

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidInstance(_)
            | Error::InvalidMatching(_)
            | Error::InvalidGraph(_)
            | Error::InvalidConfig(_)
            | Error::Json(_) => 2,
            Error::InfeasiblePerfect | Error::InstanceTooLarge { .. } | Error::Certificate(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
            Error::Cell { source, .. } => source.exit_code(),
        }
    }
}
