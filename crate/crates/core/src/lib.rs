//! Exact and numerical tools for quartic forms invariant under
//! `Spin(9) × O(k)` acting on `16 × k` real matrices.
//!
//! The exact side works over [`num_rational::BigRational`]: octonion
//! arithmetic, the rank-9 Clifford system built from it, the invariant
//! sum-of-squares generators `s_ij`, and a small exact simplex that decides
//! SOS-ness with verifiable certificates. The numerical side samples
//! convexity and computes dense SOS lower bounds by semidefinite programming.

pub mod certificate;
pub mod clifford;
pub mod convexity;
pub mod decomposition;
pub mod dense;
pub mod error;
pub mod forms;
pub mod group;
pub mod linalg;
pub mod octonion;
pub mod sampling;
pub mod simplex;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Matrix, Q};
