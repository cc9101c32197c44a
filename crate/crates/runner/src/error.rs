use std::fmt;
use std::path::PathBuf;

/// One located problem in a configuration file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error("{origin}: invalid configuration\n{}", render(issues))]
    Config { origin: String, issues: Vec<Issue> },

    #[error("unknown bundled config `{0}` (see `swaptest list-configs`)")]
    UnknownConfig(String),

    #[error("grid point {index} ({values}): {source}")]
    Simulation {
        index: usize,
        values: String,
        #[source]
        source: swaptest::Error,
    },

    #[error("{0}")]
    Core(#[from] swaptest::Error),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("{path}: {message}")]
    Csv { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

fn render(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl RunnerError {
    /// Process exit code for this failure category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Config { .. } | Self::UnknownConfig(_) => 3,
            Self::Simulation { .. } | Self::Core(_) => 4,
            Self::Fit(_) => 5,
            Self::Csv { .. } | Self::Io { .. } => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, RunnerError>;
