//! Loss-landscape analysis for variational quantum circuits.
//!
//! The crate simulates parameterized circuits on a dense statevector, computes
//! exact gradients and Hessians of their losses with the parameter-shift rule,
//! and reads off local curvature from the Hessian eigenspectrum.
//!
//! - [`qsim`]: statevector, gates, circuits.
//! - [`losses`]: scalar losses over circuit outputs with closed-form `l'`/`l''`.
//! - [`shiftcalc`]: shift-rule gradients and Hessians, finite-difference oracles.
//! - [`spectral`]: Jacobi eigensolver, stationary-point classification, perturbation scans.
//! - [`data`]: circle dataset and prediction-map grids.
//! - [`models`]: toy, layered and data-reuploading circuits; the classical FFNN baseline.
//! - [`optim`]: gradient descent, Hessian learning rate, quantum natural gradient.
//! - [`verify`]: closed-form and Monte-Carlo oracles used to gate the build.

pub mod data;
mod error;
pub mod losses;
pub mod models;
pub mod optim;
pub mod qsim;
pub mod rng;
pub mod shiftcalc;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
