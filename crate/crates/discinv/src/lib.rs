//! Numerical toolkit for reconstructing a Schrödinger potential on the unit
//! disc from boundary data of oscillating (complex geometrical optics)
//! solutions.
//!
//! Modules, bottom up:
//!
//! - [`grid`]: cell-centred grids, sampled fields, quadrature and norms.
//! - [`operators`]: Cauchy and Beurling transforms by padded FFT
//!   convolution, the Gaussian kernel `κ_n` and its Fourier transform.
//! - [`stationary_phase`]: the averaging operator `T_n`.
//! - [`cgo`]: cutoffs, phases and the fixed-point construction of the
//!   oscillating solutions.
//! - [`forward`]: polar Dirichlet solver and boundary identities.
//! - [`reconstruct`]: the boundary functional and the reconstruction sweep.
//! - [`potential`], [`io`]: fixtures and file formats.

pub mod cgo;
pub mod error;
pub mod forward;
pub mod grid;
pub mod io;
pub mod operators;
pub mod potential;
pub mod reconstruct;
pub mod stationary_phase;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec};
pub use num_complex::Complex64;
pub use potential::Potential;
