use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (expected {expected})")]
    IndexOutOfRange { index: usize, expected: &'static str },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not a signed permutation: {0}")]
    NotSignedPermutation(String),

    #[error("matrix has rank {found}, expected {expected}")]
    RankDeficient { found: usize, expected: usize },

    #[error("invalid certificate: {0}")]
    CertificateInvalid(String),

    #[error("internal identity violated: {0}")]
    IdentityMismatch(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("convexity refuted at sample {sample}: min eigenvalue {eigenvalue:e} below {threshold:e}")]
    ConvexityRefuted {
        sample: usize,
        eigenvalue: f64,
        threshold: f64,
    },

    #[error("solver did not converge after {iterations} iterations (gap {gap:e}, infeasibility {infeasibility:e})")]
    NotConverged {
        iterations: usize,
        gap: f64,
        infeasibility: f64,
    },

    #[error("gap undefined: form is constant on the sphere (max {max}, min {min})")]
    UndefinedGap { max: f64, min: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parse error at line {line}: {message}")]
    ParseLine { line: usize, message: String },
}
