//! Numerical checks of the spectral inequality on thick sets and of the
//! interpolation estimate
//! `‖g(T)‖ ≤ e^{C/α·(1+1/T³)} ‖g(T)‖_{L²(ω)}^{1−α} ‖g₀‖^α`.
//!
//! All constants are tracked in norm form. The spectral constant `C₁` is the
//! smallest value with `‖f‖ ≤ e^{C₁(1+N)} ‖f‖_{L²(ω)}` for `supp f̂ ⊂ B_N`;
//! the unnormalized-inversion ratio of [`spectral_ratio`] relates to it by
//! `‖f‖²/‖f‖²_ω = (2π)^{2d} · ratio`.

mod interpolation;
mod ledger;
mod spectral;

pub use interpolation::{
    covering_grid, restricted_norm, restricted_norm_masked, restricted_norm_on, verify_interpolation,
    InterpolationReport, VerifyOptions,
};
pub use ledger::{assemble_interpolation_bound, epsilon_minimize, ConstantLedger, EpsilonMinimum, InterpolationBound};
pub use spectral::{fit_spectral_constant, spectral_ratio, FitOptions, SpectralRow, SpectralTestReport};
