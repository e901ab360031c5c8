use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("frequency {f_hz} Hz outside material range [{min_hz}, {max_hz}] Hz")]
    OutOfRange { f_hz: f64, min_hz: f64, max_hz: f64 },
    #[error("singular network: ABCD denominator magnitude {0:e}")]
    SingularNetwork(f64),
    #[error("non-passive data: no reflection root with |Γ| <= 1 (smallest |Γ| = {0})")]
    NonPassiveData(f64),
    #[error("singular inversion: |1 - (S11+S21)Γ| = {0:e}")]
    SingularInversion(f64),
    #[error("open-circuit singularity: Γ too close to 1")]
    OpenCircuit,
    #[error("branch ambiguity between {f_lo_hz} Hz and {f_hi_hz} Hz (points {index} and {}): phase step {step_rad} rad", index + 1)]
    BranchAmbiguity {
        index: usize,
        f_lo_hz: f64,
        f_hi_hz: f64,
        step_rad: f64,
    },
    #[error("unphysical point at {f_hz} Hz: {reason}")]
    UnphysicalPoint { f_hz: f64, reason: String },
    #[error("extraction failed: {flagged} of {total} points unusable")]
    ExtractionFailed {
        flagged: usize,
        total: usize,
        diagnostics: Vec<String>,
    },
    #[error("unsupported material: {0}")]
    UnsupportedMaterial(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
