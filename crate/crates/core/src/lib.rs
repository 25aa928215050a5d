//! Kernels, discretized operators and identity checks for the Dirac field in
//! an external potential, posed on space-like Cauchy surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`conventions`] and [`minkowski`]: metric, Dirac matrices, boosts.
//! * [`bessel`]: `K_1` on the cut plane via an integral representation.
//! * [`kernels`]: `D`, `p^-`, gauge phases, dressed and counter kernels.
//! * [`field`] and [`surface`]: bump potentials and graph surfaces.
//! * [`operators`]: Nystrom discretization, flat spectral projector,
//!   Hilbert-Schmidt diagnostics and the unitary representative.
//! * [`flow`]: the flow derivative along a family of surfaces.
//! * [`oracle`]: brute-force mass-shell quadrature used as reference.
//! * [`bounds`] and [`identities`]: sampled checks of the analytic estimates.

pub mod bessel;
pub mod bounds;
pub mod conventions;
pub mod error;
pub mod field;
pub mod flow;
pub mod identities;
pub mod kernels;
pub mod minkowski;
pub mod operators;
pub mod oracle;
pub mod quadrature;
pub mod stats;
pub mod surface;

pub use error::{CauchyError, Result};
pub use minkowski::{ComplexFourVector, FourVector, SpinorMatrix, C64};
