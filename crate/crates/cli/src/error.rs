use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("numerical rejection: {0}")]
    Numerical(pdseq::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 ok, 1 I/O, 2 validation, 3 numerical rejection.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<pdseq::Error> for CliError {
    fn from(e: pdseq::Error) -> Self {
        use pdseq::Error as E;
        match e {
            E::NotPositiveDefinite { .. } | E::RejectionExhausted(_) | E::CoverageShortfall { .. } | E::PlanOverflow { .. } => {
                CliError::Numerical(e)
            }
            other => CliError::Validation {
                field: "params".into(),
                message: other.to_string(),
            },
        }
    }
}
