//! Numerical analysis of the skew-perturbed harmonic oscillator
//! `H_ε = −∂ₓ² + x² + (i/ε) f(x)` on the real line.
//!
//! The crate discretizes `H_ε` by second-order finite differences with Dirichlet
//! truncation and provides resolvent-norm scans, spectral computations with
//! semiclassical predictions, and a hypocoercive decay verifier.

pub mod ddouble;
pub mod error;
pub mod fit;
pub mod hypocoercivity;
pub mod linalg;
pub mod model;
pub mod pseudospectrum;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, LinalgError, ModelError, Result};
pub use linalg::SolverSettings;
pub use model::{ComplexBandedMatrix, Grid, GridRule, OperatorConfig, Potential, PotentialKind, SymTridiagonal};
pub use num_complex::Complex64;
