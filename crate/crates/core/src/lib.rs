//! Recovery of a signal pair from its two autocorrelations and its
//! cross-correlation.
//!
//! The pair `(x1, x2)` is stacked into `x` and lifted to the rank-one PSD
//! matrix `x x*`. Correlations become linear trace measurements of the lifted
//! matrix, so recovery reduces to a PSD-constrained least-squares program
//! ([`solver`]). The remaining modules supply the z-domain algebra that
//! explains when recovery is unique:
//!
//! * [`poly`]: signals as polynomials in `z^-1`, roots, GCD and the greatest
//!   self-reciprocal divisor.
//! * [`ambiguity`]: enumeration of convolution and autocorrelation
//!   ambiguities by reassigning zeros.
//! * [`sensing`]: the lifted measurement operator, its adjoint and the noise
//!   model.
//! * [`sylvester`]: Sylvester matrices, the dual certificate `S*S` and the
//!   tangent-space injectivity check.
//! * [`linalg`]: the dense complex kernel everything above runs on.
//! * [`corpus`]: random signal generators for experiments and tests.

pub mod ambiguity;
pub mod corpus;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod sensing;
pub mod solver;
pub mod sylvester;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigDecomposition, HermitianMatrix};
pub use num_complex::Complex64 as C64;
pub use poly::{RootSet, Signal};
pub use sensing::{Measurements, NoiseModel, SensingSet};
pub use solver::{SolverOptions, SolverResult};
pub use sylvester::CertificateReport;
