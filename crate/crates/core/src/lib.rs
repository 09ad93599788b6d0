//! Cut-norms, cut-distances and spectra of dense complex matrices.

pub mod blowup;
pub mod cutnorm;
pub mod distance;
pub mod error;
pub mod graycode;
pub mod io;
pub mod matrix;
pub mod parallel;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
pub use matrix::{Aggregates, IndexSet, KahanSum, KahanSumC, Matrix};
pub use scalar::{Real, C, C64};

/// Double-precision matrix, the instantiation used by the CLI and reports.
pub type Matrix64 = Matrix<f64>;
/// Single-precision matrix, mostly exercised by tests.
pub type Matrix32 = Matrix<f32>;
