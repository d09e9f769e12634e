//! Numerical models of PGL2(R) representations and the invariant trilinear
//! functionals built from singular kernels.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`] and [`repn`]: projective 2x2 matrices, Möbius maps and
//!   representation labels.
//! * [`vector`]: lazily composed vectors in the line and circle models, with
//!   the group action, norms, moments and the invariant pairing.
//! * [`quadrature`]: adaptive Gauss-Kronrod integration in up to three
//!   dimensions and analytically continued power integrals.
//! * [`kernels`]: exponent bookkeeping and evaluation of the trilinear kernels.
//! * [`testvectors`]: bump test vectors and the moment-matched companion.
//! * [`functionals`]: the trilinear functional, its two-variable reduction,
//!   K-type values and normalization factors.
//! * [`harness`]: experiment runners producing machine-readable reports.

pub mod error;
pub mod functionals;
pub mod group;
pub mod harness;
pub mod kernels;
pub mod quadrature;
pub mod repn;
pub mod series;
pub mod testvectors;
pub mod vector;

pub use error::{Error, Result};
pub use group::GroupElement;
pub use quadrature::QuadResult;
pub use repn::RepnParam;
pub use vector::ModelVector;

pub use num_complex::Complex64;
