//! Boundary conditions, Green's functions and spectra for the finite
//! Euler–Bernoulli beam on an elastic foundation,
//!
//! ```text
//! u⁗ + α⁴u = (α⁴/k)·w  on [−l, l],   M·𝓑[u] = 0,
//! ```
//!
//! where 𝓑[u] stacks (u, u′, u″, u‴) at −l and at l.

pub mod boundary;
pub mod error;
pub mod existence;
pub mod greens;
pub mod json;
pub mod matrix_kit;
pub mod nystrom;
pub mod representation;
pub mod spectral;

pub use error::{Error, Result};
