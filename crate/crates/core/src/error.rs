use thiserror::Error;

/// Which validity condition on the coupling tensor failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingCondition {
    /// `J_xx + J_yy != 0`: the interaction must have an exchange component.
    Exchange,
    /// `J_xy == J_yx`: required for real SES couplings.
    Reality,
}

impl std::fmt::Display for CouplingCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CouplingCondition::Exchange => write!(f, "exchange condition J_xx + J_yy != 0"),
            CouplingCondition::Reality => write!(f, "reality condition J_xy == J_yx"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SesError {
    #[error("dimension must be at least {min}, got {n}")]
    DimensionTooSmall { n: usize, min: usize },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (|psi|^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("single-excitation weight {weight:e} too small to project")]
    DegenerateProjection { weight: f64 },

    #[error("matrix is not symmetric at ({row}, {col}): |delta| = {delta:e}")]
    Asymmetric { row: usize, col: usize, delta: f64 },

    #[error("invalid device parameters: {0}")]
    InvalidDevice(String),

    #[error("coupling tensor violates the {0}")]
    CouplingCondition(CouplingCondition),

    #[error(
        "qubit {qubit} needs detuning {required:.6} rad/us but the frequency range half-width is {available:.6} rad/us"
    )]
    Infeasible {
        qubit: usize,
        required: f64,
        available: f64,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("{n} qubits exceeds the full-space limit of {max}")]
    SystemTooLarge { n: usize, max: usize },

    #[error("evolved unitary deviates from the target by {deviation:e} beyond any global phase")]
    PhaseMismatch { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, SesError>;
