//! Spectral certificates of absolute separability (AS) and absolute PPT (AP).
//!
//! A state is absolutely separable when every unitary conjugate of it is
//! separable, a property of its eigenvalues alone. This crate evaluates the
//! known eigenvalue criteria, decides membership in convex hulls of the sets
//! they detect, derives hull facets exactly, and searches for NPT witnesses.
//!
//! Eigenvalues are always sorted ascending: `λ_0` is the smallest.

pub mod chull;
pub mod criteria;
pub mod error;
pub mod falsify;
pub mod io;
pub mod maps;
pub mod polytope;
pub mod report;
pub mod scan;
pub mod spectrum;
pub mod symmetric;

pub use error::{Error, Result};
pub use spectrum::{validate_spectrum, Spectrum, SystemDims, Tolerances};
