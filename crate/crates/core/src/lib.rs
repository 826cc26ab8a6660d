//! Extended (spatially-varying) correlation and convolution.
//!
//! A filter that is rotated or scaled differently at every pixel is split
//! into group harmonics; each harmonic needs one ordinary FFT convolution
//! and the per-pixel transform reduces to a phase (or Wigner-D) weighting of
//! the results.

pub mod apps;
pub mod decomp;
pub mod engine;
pub mod error;
pub mod fft;
pub mod field;
pub mod gradient;
pub mod polar;
pub mod quat;
pub mod sh;
pub mod xform;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use field::{CenteredField, CenteredVolume, Field2, Field3, FilterSource2, FilterSource3};
pub use quat::Quaternion;
pub use xform::{Group, XformField};
