//! Arbitrary-precision spectral laboratory for the truncated Weil quadratic form.
//!
//! The pipeline assembles the matrix of the Weil form restricted to the span of the
//! `2N+1` lowest eigenfunctions of the scaling operator on `[1/λ, λ]`, extracts its
//! minimal (even) eigenvector `ξ`, and computes the spectrum of the rank-one
//! perturbation of the scaling operator that has `ξ` in its kernel. An independent
//! Riemann Ξ evaluator built from the theta series produces the reference zeros
//! against which that spectrum is compared.
//!
//! Modules, bottom-up:
//!
//! * [`precision`]: working precision and tolerances.
//! * [`specfun`]: ψ, ψ⁽¹⁾, ₂F₁ and Φ(z, 2, x) at arbitrary precision.
//! * [`quad`]: tanh-sinh quadrature, used by the independent oracles.
//! * [`weil_form`]: closed-form matrix elements and assembly.
//! * [`spectral`]: cyclic Jacobi eigensolver and the even-simple check.
//! * [`dirac_pert`]: secular roots, `ξ̂`, regularized determinants.
//! * [`xi_oracle`]: theta-series Ξ and the reference zero table.
//! * [`io`]: the text formats for matrices, eigendata, spectra and zeros.
//! * [`pipeline`]: end-to-end runs and comparison tables.

pub mod dirac_pert;
pub mod error;
pub mod io;
pub mod matrix;
pub mod par;
pub mod pipeline;
pub mod precision;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod weil_form;
pub mod xi_oracle;

pub use error::{Error, Result};
pub use par::Execution;
pub use precision::{MpComplex, MpReal, PrecisionContext};
