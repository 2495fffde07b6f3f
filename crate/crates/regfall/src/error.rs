//! Error type shared by all modules.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A loop with vanishing L^2 norm where a nonzero loop is required.
    ZeroLoop,
    /// Fewer samples than the 2N+1 needed for a lossless Fourier projection.
    InsufficientSamples { got: usize, need: usize },
    /// The mode index k must be a positive integer.
    BadMode { k: i64 },
    /// An eigenvalue range request that the truncation cannot honour.
    BadRange { reason: String },
    /// Galerkin truncation too small for the requested computation.
    TruncationTooSmall { n: usize, need: usize },
    /// Scalar argument outside its admissible interval.
    DomainError { value: f64 },
    /// The classical-time map is not strictly increasing.
    NonMonotone,
    /// A trajectory touches zero where a strictly positive one is required.
    CollisionPresent { min_value: f64 },
    /// The loop is not a critical point within tolerance.
    NotCritical { residual: f64 },
    /// Eigenvectors of one numeric eigenvalue cluster disagree on winding.
    DegenerateWindingMismatch { lambda: f64 },
    /// Requested spectral window exceeds the reliably resolved range.
    WindowTooWide,
    /// Zero is an eigenvalue within tolerance; the index is undefined.
    DegenerateAtZero,
    /// The winding-achieving eigenvalues are not resolved inside the window.
    WindowInsufficient,
    /// Eigensolver did not converge within the sweep budget.
    NoConvergence,
    /// Eigenvector length does not match the basis layout.
    LayoutMismatch { got: usize, need: usize },
    /// An eigenvector dips below the vanishing floor on the sample grid.
    VanishingEigenvector,
    /// Accumulated angle is too far from an integer multiple of 2*pi.
    NonIntegralWinding { residual: f64 },
    /// Malformed input data (CLI / JSON level).
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroLoop => write!(f, "loop is identically zero"),
            Error::InsufficientSamples { got, need } => {
                write!(
                    f,
                    "need at least {need} samples for a lossless projection, got {got}"
                )
            }
            Error::BadMode { k } => write!(f, "mode index must be a positive integer, got {k}"),
            Error::BadRange { reason } => write!(f, "bad range: {reason}"),
            Error::TruncationTooSmall { n, need } => {
                write!(f, "truncation N = {n} too small, need at least {need}")
            }
            Error::DomainError { value } => write!(f, "argument {value} outside domain"),
            Error::NonMonotone => write!(f, "classical time is not strictly increasing"),
            Error::CollisionPresent { min_value } => {
                write!(f, "trajectory not strictly positive (min {min_value:e})")
            }
            Error::NotCritical { residual } => {
                write!(
                    f,
                    "loop is not a critical point (gradient norm {residual:e})"
                )
            }
            Error::DegenerateWindingMismatch { lambda } => {
                write!(f, "eigenvectors of cluster at {lambda} disagree on winding")
            }
            Error::WindowTooWide => write!(f, "spectral window exceeds resolved range"),
            Error::DegenerateAtZero => write!(f, "zero is an eigenvalue; index undefined"),
            Error::WindowInsufficient => {
                write!(
                    f,
                    "winding-achieving eigenvalues not resolved inside the window"
                )
            }
            Error::NoConvergence => write!(f, "eigensolver failed to converge"),
            Error::LayoutMismatch { got, need } => {
                write!(
                    f,
                    "vector length {got} does not match layout dimension {need}"
                )
            }
            Error::VanishingEigenvector => write!(f, "eigenvector vanishes on the sample grid"),
            Error::NonIntegralWinding { residual } => {
                write!(
                    f,
                    "winding residual {residual} exceeds 0.25; grid too coarse"
                )
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
