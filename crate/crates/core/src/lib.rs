//! Alias-free convolutional networks built on exact DFT-domain resampling.
//!
//! The crate is organized around the pipeline it verifies:
//!
//! - [`spectral`] — ideal low-pass filtering, integer up/downsampling and
//!   fractional circular shifts for periodic signals, exact in the DFT domain.
//! - [`oracle`] — slow, independent references (naive DFT, Dirichlet
//!   interpolation, dense-grid continuous-domain simulation) used to validate
//!   every fast path.
//! - [`layers`] — circular convolution, BlurPool, alias-free polynomial
//!   activations, alias-free LayerNorm, and their aliasing baseline
//!   counterparts.
//! - [`network`] — small ConvNeXt-style classifiers in `baseline` and `afc`
//!   variants with per-layer output taps.
//! - [`metrics`] — the equivariance diff, shift-consistency, and adversarial
//!   translation-grid accuracy instruments.
//!
//! Everything is pure `f64` math on immutable inputs and safe to call from
//! multiple threads.

pub mod error;
pub mod layers;
pub mod metrics;
pub mod network;
pub mod oracle;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use spectral::{Cutoff, DftMask, RationalShift};
pub use tensor::Tensor3;
