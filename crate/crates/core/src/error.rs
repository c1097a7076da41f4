use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("multivectors belong to different metrics")]
    MetricMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series or iteration did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("horizontal degree {degree} is not supported (n = {n})")]
    UnsupportedDegree { degree: usize, n: usize },

    #[error("form is not Hamiltonian: {0}")]
    NotHamiltonian(String),

    #[error("bracket of degrees ({r}, {s}) has no defined result degree for n = {n}")]
    UndefinedBracketDegree { r: usize, s: usize, n: usize },

    #[error("invalid solution data: {0}")]
    InvalidSolutionData(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("no real frequency for mode N = {level}: omega^2 = {omega_sq}")]
    TachyonicMode { level: usize, omega_sq: f64 },

    #[error("|S| vanishes at the evaluation point")]
    SingularHJNorm,

    #[error("wave function cannot be written as R exp(i S.gamma / hbar kappa): {0}")]
    DecompositionFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
