//! Exact solution operators and numerical verifiers for unique-continuation
//! and observability estimates of the Kolmogorov equation
//! `(∂t + v·∇x − Δv) g = 0` on the whole phase space `ℝ^d_x × ℝ^d_v`.
//!
//! The crate is `no_std` + `alloc`. The `std` feature (on by default) adds a
//! `rustfft`-backed [`fourier::FourierPlan`]; without it callers supply their
//! own one-dimensional transforms through [`fourier::LineTransform`].
//!
//! Fourier convention used throughout:
//!
//! ```text
//! f̂(ζ) = ∫ f(z) e^{-i z·ζ} dz,      f(z) = (2π)^{-2d} ∫ f̂(ζ) e^{i z·ζ} dζ,
//! ‖f̂‖ = (2π)^d ‖f‖.
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod fourier;
pub mod grid;
pub mod lab;
pub mod linalg;
pub mod math;
pub mod mixture;
pub mod propagator;
pub mod telescope;
pub mod thickness;

pub use error::{Error, Result};
pub use fourier::{FourierPlan, LineTransform};
pub use grid::{GridMask, NormReport, PhaseField, PhaseGrid, SpectralField};
pub use mixture::{GaussianMixtureState, GaussianTerm};
pub use num_complex::Complex64;
pub use thickness::{ThickSetDescriptor, ThicknessVerdict};
