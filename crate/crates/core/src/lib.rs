//! Reconstruction of binary hypermatrices from deck sums, and certified peak
//! polynomials on lattice point sets.

pub mod error;
pub mod hypermatrix;
pub mod lattice;
pub mod numerics;
pub mod oracle;
pub mod peak;
pub mod planar;
pub mod pulse;

pub use error::{Error, Result};
