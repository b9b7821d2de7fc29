use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: rarz::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn numerical(context: impl Into<String>) -> impl FnOnce(rarz::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Numerical { context, source }
    }

    /// 0 success, 1 I/O, 2 configuration, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}
