//! Crate-wide error type and process exit-code mapping.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Error, Debug)]
pub enum Error {
    #[error("symbol evaluation produced a non-finite value at theta = {theta}")]
    NonFiniteEvaluation { theta: f64 },

    #[error("symbol is not real-valued within tolerance (max imaginary ratio {ratio:.3e})")]
    NotReal { ratio: f64 },

    #[error("symbol is not even within tolerance (max mismatch ratio {ratio:.3e})")]
    NotEven { ratio: f64 },

    #[error("symbol is not strictly positive (sampled minimum {min:.6e})")]
    NotPositive { min: f64 },

    #[error("matrix is singular to working tolerance (pivot {pivot:.3e}, threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NonHermitian { max_asymmetry: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenNoConvergence,

    #[error("root finding did not converge (residual {residual:.3e} after fallback)")]
    RootFindingFailed { residual: f64 },

    #[error("associated polynomial has a root on the unit circle (|root| = {modulus:.12})")]
    BoundaryRoot { modulus: f64 },

    #[error("root split is unbalanced: {inside} inside / {outside} outside, expected {expected} each")]
    UnbalancedSplit {
        inside: usize,
        outside: usize,
        expected: usize,
    },

    #[error("inside root of multiplicity {multiplicity} at {root}; closed-form inverse requires simple roots (a coefficient perturbation of about 1e-6 separates the cluster)")]
    MultipleInsideRoots {
        root: num_complex::Complex64,
        multiplicity: usize,
    },

    #[error("partial fractions require pairwise-distinct poles (min gap {gap:.3e})")]
    CoincidentPoles { gap: f64 },

    #[error("I - H is singular to tolerance (smallest singular value {sigma_min:.3e}); N is below the usable threshold for this symbol")]
    SingularCorrection { sigma_min: f64 },

    #[error("Levinson recursion broke down at step {step} (prediction variance {variance:.3e}); the moment matrix is not positive definite")]
    LevinsonBreakdown { step: usize, variance: f64 },

    #[error("level {level:.12e} is within tolerance of an excluded level (critical value or endpoint)")]
    ExcludedLevel { level: f64 },

    #[error("preimage solve failed for level {level:.12e}")]
    PreimageSolveFailed { level: f64 },

    #[error("bracketing found {} eigenvalue(s), expected {expected}", found.len())]
    BracketCountMismatch { expected: usize, found: Vec<f64> },

    #[error("eigenvalue list has length {got}, expected {expected}")]
    EigenvalueCountMismatch { expected: usize, got: usize },

    #[error("square-modulus approximation cannot reach sup-error {target:.3e} by degree {max_degree} (best {best:.3e})")]
    ApproximationTargetUnreachable {
        target: f64,
        max_degree: usize,
        best: f64,
    },

    #[error("approximation margin violated: sup-error {eps:.6e} >= min(f)/2 = {half_min:.6e}")]
    MarginViolated { eps: f64, half_min: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 0 success, 2 config, 3 boundary root,
    /// 4 multiple inside roots, 5 singular correction, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::BoundaryRoot { .. } => 3,
            Error::MultipleInsideRoots { .. } => 4,
            Error::SingularCorrection { .. } => 5,
            _ => 1,
        }
    }
}
