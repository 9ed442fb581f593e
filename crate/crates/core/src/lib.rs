//! Spinor calculus on strictly pseudoconvex CR manifolds, realized on
//! homogeneous model geometries.
//!
//! * [`clifford`]: the spinor module `Σ = Λ•C^m` with exact arithmetic;
//! * [`models`]: Heisenberg quotients, circle bundles over flat tori and
//!   sphere curvature data;
//! * [`operators`]: Kohn–Dirac, sub-Laplacian and twistor matrices on
//!   truncated section spaces, spectra and kernels;
//! * [`weitzenboeck`]: Schrödinger–Lichnerowicz residuals and conformal
//!   covariance checks;
//! * [`cohomology`]: Kohn Laplacians and twisted Kohn–Rossi tables;
//! * [`vanishing`]: clause-by-clause vanishing verdicts and obstructions;
//! * [`config`], [`run`], [`io`]: the batch runner behind the `crspin`
//!   binary.

pub mod clifford;
pub mod cohomology;
pub mod config;
pub mod error;
pub mod io;
pub mod models;
pub mod operators;
pub mod run;
pub mod vanishing;
pub mod weitzenboeck;

pub use error::{Error, Result};
