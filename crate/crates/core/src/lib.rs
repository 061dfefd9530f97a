//! Sparse principal subspace estimation under the sparse spiked covariance
//! model.
//!
//! Two estimators share one alternating scheme: an orthogonal `A`-update
//! (polar factor of `X'X B`) followed by a sparse `B`-update.
//!
//! * **SPCA**: the `B`-update solves `r` elastic-net problems by coordinate
//!   descent ([`solvers::run_spca`]).
//! * **ITPS**: the `λ0 → ∞` limit, where the `B`-update is an entrywise soft
//!   threshold of `X'X A` ([`solvers::run_itps`]).
//!
//! Both are seeded by diagonal thresholding ([`init::dt_init`]). The
//! [`harness`] module runs seeded Monte-Carlo experiments over data drawn
//! from [`model`] and scores them with [`metrics`].

pub mod error;
pub mod harness;
pub mod init;
pub mod metrics;
pub mod model;
pub mod numlin;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use numlin::DenseMatrix;
