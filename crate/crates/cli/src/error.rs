use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {}{msg}", location(.key, .line))]
    Config {
        path: PathBuf,
        key: Option<String>,
        line: Option<usize>,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} already exists; pass --overwrite to replace it")]
    Exists(PathBuf),
    #[error(transparent)]
    Core(#[from] laguerre_thresh::Error),
    #[error("cannot start worker pool: {0}")]
    Threads(String),
}

fn location(key: &Option<String>, line: &Option<usize>) -> String {
    match (key, line) {
        (Some(k), Some(l)) => format!("line {l}, key `{k}`: "),
        (Some(k), None) => format!("key `{k}`: "),
        (None, Some(l)) => format!("line {l}: "),
        (None, None) => String::new(),
    }
}

impl CliError {
    /// Machine-readable category printed with every failure.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Io { .. } | CliError::Exists(_) => "io",
            CliError::Core(_) => "numerical",
            CliError::Threads(_) => "runtime",
        }
    }

    /// Process exit code; 2 is left to argument parsing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Io { .. } | CliError::Exists(_) => 4,
            CliError::Core(_) => 5,
            CliError::Threads(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
