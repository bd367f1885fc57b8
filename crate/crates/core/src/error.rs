use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {limit:.3e}")]
    NonHermitianInput { defect: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field is in the {found} representation, operation requires {required}")]
    WrongRepresentation {
        found: &'static str,
        required: &'static str,
    },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("shift {shift} is not an integer multiple of dz = {dz}")]
    NonCommensurateShift { shift: f64, dz: f64 },

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("precondition not met, check skipped: {0}")]
    SkippedPrecondition(String),

    #[error("field is not in the Hardy class: relative mass {outside:.3e} outside the class")]
    NotInHardyClass { outside: f64 },

    #[error("field is not in the inductive class below cutoff {cutoff}: relative mass {outside:.3e} outside")]
    NotInInductiveClass { cutoff: f64, outside: f64 },

    #[error("amplitudes are not normalized: squared norm {norm_sq}")]
    UnnormalizedAmplitudes { norm_sq: f64 },

    #[error("amplitudes have relative mass {outside:.3e} at k > {cutoff}")]
    SupportViolation { cutoff: f64, outside: f64 },

    #[error("tolerance must be positive, got {0}")]
    NonpositiveTolerance(f64),

    #[error("jump density has empty support")]
    DegenerateDensity,

    #[error("malformed field data: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
