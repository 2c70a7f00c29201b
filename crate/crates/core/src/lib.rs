//! Numerical machinery for Hermitian Toeplitz matrices built from a symbol:
//! closed-form inversion of banded matrices through the roots of the
//! associated polynomial, certified exponential decay of inverse entries,
//! secular-determinant eigenvalue location for even symbols, Weyl
//! equidistribution statistics, and Levinson predictor polynomials, each
//! cross-checked against dense linear-algebra oracles.

pub mod band_inverse;
pub mod error;
pub mod factorization;
pub mod linalg;
pub mod polyroots;
pub mod regular;
pub mod report;
pub mod secular;
pub mod symbols;
pub mod toeplitz;

pub use error::{Error, Result};
pub use symbols::{ChebForm, Symbol, SymbolFlags};
pub use toeplitz::ToeplitzMatrix;
