//! Exact Hilbert series of Coulomb branches of quiver gauge theories via the
//! monopole formula, with the weight combinatorics and convergence checks
//! around it.

pub mod affine;
pub mod engine;
pub mod enumeration;
pub mod error;
pub mod gauge;
pub mod linalg;
pub mod lp;
pub mod quiver;
pub mod series;
pub mod weights;

pub use error::{Error, Result};
