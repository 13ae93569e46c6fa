use alloc::format;

use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::math;
use crate::mixture::GaussianMixtureState;

/// Constants of the Fourier-side decay estimate
/// `∫_{|ζ|>N} |ĝ(T)|² ≤ e^{−c·N²·min{T,T³}} ‖ĝ₀‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayConstants {
    /// Coefficient of `N²min{T,T³}` in the tail bound.
    pub c_exponent: f64,
    /// Coefficient in `Q(t,ζ) ≥ c·|ζ|²·min{t,t³}`.
    pub c_pointwise: f64,
    /// Squared-norm rate, `c_exponent / 2`.
    pub c2: f64,
    /// Squared-norm offset.
    pub c3: f64,
}

impl DecayConstants {
    /// The explicit constants `1/15`, `1/30`, `C₂ = 1/30`, `C₃ = d·ln(2π)`.
    pub fn explicit(d: usize) -> Self {
        DecayConstants {
            c_exponent: 1.0 / 15.0,
            c_pointwise: 1.0 / 30.0,
            c2: 1.0 / 30.0,
            c3: d as f64 * math::ln(2.0 * core::f64::consts::PI),
        }
    }

    /// Custom constants; `C₂` is derived from `c_exponent`.
    pub fn new(c_exponent: f64, c_pointwise: f64, c3: f64) -> Result<Self> {
        let k = DecayConstants { c_exponent, c_pointwise, c2: c_exponent / 2.0, c3 };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_exponent", self.c_exponent), ("c_pointwise", self.c_pointwise), ("C2", self.c2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.c3 >= 0.0) || !self.c3.is_finite() {
            return Err(Error::param("C3", format!("must be finite and ≥ 0, got {}", self.c3)));
        }
        if self.c_exponent != 2.0 * self.c2 {
            return Err(Error::param(
                "C2",
                format!("must equal c_exponent / 2 ({}), got {}", self.c_exponent / 2.0, self.c2),
            ));
        }
        Ok(())
    }
}

/// `e^{−c_exponent·N²·min{T,T³}} · ‖ĝ₀‖²`.
pub fn decay_bound(n: f64, t: f64, spectral_norm_sq_g0: f64, k: &DecayConstants) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("T", format!("final time must be finite and > 0, got {t}")));
    }
    if !(n >= 0.0) {
        return Err(Error::param("N", format!("must be ≥ 0, got {n}")));
    }
    if !(spectral_norm_sq_g0 >= 0.0) {
        return Err(Error::param("spectral_norm_sq_g0", format!("must be ≥ 0, got {spectral_norm_sq_g0}")));
    }
    Ok(math::exp(-k.c_exponent * n * n * math::min_t_t3(t)) * spectral_norm_sq_g0)
}

/// `∫_{|ζ|>N} |ĝ|²` by the grid rectangle rule.
pub fn tail_mass_grid(f: &SpectralField, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::param("N", format!("must be ≥ 0, got {n}")));
    }
    Ok(f.tail_mass(n))
}

/// `∫_{|ζ|>N} |ĝ|²` of the closed form.
pub fn tail_mass_mixture(s: &GaussianMixtureState, n: f64) -> Result<f64> {
    Ok(s.band_and_tail_mass(n)?.1)
}
