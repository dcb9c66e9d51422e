//! Binary Johnson-Lindenstrauss embeddings.
//!
//! Vectors are mapped to bit strings by a random linear map followed by a
//! dithered sign quantizer, `x -> sign(Ax + tau)` with `tau` uniform on
//! `[-lambda, lambda]^m`. Distances and inner products are then read back
//! from the bits alone:
//!
//! - [`GaussianSketcher`] uses a dense standard Gaussian `A`; the rescaled
//!   Hamming distance `sqrt(2 pi) lambda / m * d_H` estimates `||x - y||_2`.
//! - [`CirculantSketcher`] uses a subsampled random circulant matrix applied
//!   with an FFT in `O(n log n)` time, and two independent dithers. The
//!   cross-branch pairing of the two codes estimates `<x, y>` and
//!   `||x - y||_2^2`.
//!
//! The [`complexity`] module estimates covering numbers and localized
//! Gaussian complexities of finite datasets and turns them into `(lambda, m)`
//! recommendations. The [`harness`] module holds file formats and the
//! statistical verification campaigns.

pub mod bitcode;
pub mod circulant;
pub mod complexity;
mod error;
pub mod estimators;
pub mod gaussian;
pub mod harness;
pub mod rng;

pub use bitcode::{BinaryCode, DualCode, QuantizerConfig, SignZero, WORD_BITS};
pub use circulant::{CirculantSketcher, RowPolicy, XiDistribution};
pub use error::{Error, Result};
pub use estimators::EstimatorParams;
pub use gaussian::GaussianSketcher;
