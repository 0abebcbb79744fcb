//! Numerical engine for iterative non-Gaussian state teleportation on a
//! one-dimensional quadrature grid.

pub mod error;
pub mod grid;
pub mod special;
pub mod states;
pub mod nges;
pub mod teleport;
pub mod oracle;
pub mod wigner;
pub mod fit;
pub mod experiment;

pub use error::{Error, Result};
pub use grid::{QuadratureGrid, WaveFunction};
pub use num_complex::Complex64 as C64;
