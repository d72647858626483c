use sesim_bench::BenchError;
use sesim_core::SesError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const ASYMMETRIC: i32 = 4;
    pub const DIMENSION: i32 = 5;
    pub const GROVER_RANGE: i32 = 6;
    pub const TOO_LARGE: i32 = 7;
    pub const BENCH_SCHEMA: i32 = 8;
}

pub const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  1  other failure (I/O, numerical)
  2  parse error (command line, matrix file, state file)
  3  compilation infeasible within the hardware bounds
  4  matrix not symmetric
  5  dimension mismatch
  6  Grover argument out of range
  7  system too large for full-space simulation
  8  bench config fails validation";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    BadArgument(String),
    #[error("grover: {0}")]
    GroverRange(SesError),
    #[error("{0}")]
    Core(#[from] SesError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::BadArgument(_) => exit::PARSE,
            CliError::GroverRange(_) => exit::GROVER_RANGE,
            CliError::Core(e) => core_code(e),
            CliError::Bench(BenchError::Schema(_)) => exit::BENCH_SCHEMA,
            CliError::Bench(BenchError::Core(e)) => core_code(e),
            CliError::Bench(_) | CliError::Io { .. } | CliError::Json(_) => exit::OTHER,
        }
    }
}

fn core_code(e: &SesError) -> i32 {
    match e {
        SesError::Infeasible { .. } => exit::INFEASIBLE,
        SesError::Asymmetric { .. } => exit::ASYMMETRIC,
        SesError::DimensionMismatch { .. } => exit::DIMENSION,
        SesError::SystemTooLarge { .. } => exit::TOO_LARGE,
        _ => exit::OTHER,
    }
}
