//! Counting statistics of eigenvalues in centred discs for the Ginibre
//! ensembles (real, complex, symplectic) and for planar symplectic/normal
//! ensembles with rotationally invariant potentials.
//!
//! The crate has three layers:
//!
//! * analytic kernels: [`specfun`], [`quad`];
//! * closed formulas: finite-N means ([`finite_n`]), origin-limit means,
//!   variances and covariance ([`origin`]), full counting statistics of
//!   planar ensembles ([`planar`]);
//! * Monte Carlo: matrix and Bernoulli-product samplers ([`sampler`]) with
//!   mergeable streaming moments ([`stats`]).
//!
//! The [`verify`] module bundles the cross-checks (series vs closed forms,
//! kernel oracles, derivative identities) behind a single report.

// Full-precision literals for tabulated quadrature nodes and frozen oracle
// values; `!(x >= 0)` is the deliberate NaN-rejecting domain guard.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::inconsistent_digit_grouping)]
#![allow(clippy::manual_is_multiple_of)]

pub mod error;
pub mod finite_n;
pub mod origin;
pub mod planar;
pub mod quad;
pub mod sampler;
pub mod specfun;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use finite_n::EnsembleKind;
