use alloc::format;

use crate::error::{Error, Result};
use crate::math;
use crate::propagator::DecayConstants;

/// Constants of the interpolation estimate for one `(C₁, α, T)`.
///
/// Everything is in norm form: the spectral factor is `e^{C₁(N+1)}` and the
/// tail factor `e^{C₃ − C₂N²T₃¹}` (squared forms double every exponent).
/// `C̃₁` overflows `f64` for small `T`, so only its logarithm is stored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstantLedger {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
    /// `α/(1−α)`.
    pub k_alpha: f64,
    pub t: f64,
    /// `min{T, T³}`.
    pub t31: f64,
    /// `ln C̃₁`.
    pub ln_c_tilde1: f64,
}

impl ConstantLedger {
    pub fn new(c1: f64, decay: &DecayConstants, alpha: f64, t: f64) -> Result<Self> {
        decay.validate()?;
        if !(c1 >= 0.0) || !c1.is_finite() {
            return Err(Error::param("C1", format!("must be finite and ≥ 0, got {c1}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::param("T", format!("must be finite and > 0, got {t}")));
        }
        let k_alpha = alpha / (1.0 - alpha);
        let t31 = math::min_t_t3(t);
        let c2 = decay.c2;
        let c3 = decay.c3;
        let first = c1 + c1 * c1 / (2.0 * k_alpha * c2 * t31);
        let second = core::f64::consts::LN_2 + c1 + c3 + c1 * c1 / (2.0 * c2 * t31);
        Ok(ConstantLedger { c1, c2, c3, alpha, k_alpha, t, t31, ln_c_tilde1: first.max(second) })
    }

    /// `C̃₁`, possibly `+∞`.
    pub fn c_tilde1(&self) -> f64 {
        math::exp(self.ln_c_tilde1)
    }

    /// `(C₁+C₂+C₃)²/C₂`, the constant `C` of the estimate.
    pub fn envelope_constant(&self) -> f64 {
        let s = self.c1 + self.c2 + self.c3;
        s * s / self.c2
    }

    /// `ln(2e^{(C₁+C₂+C₃)²/(C₂α)·(1+1/T³)})`, an upper bound for `ln C̃₁`.
    pub fn ln_envelope(&self) -> f64 {
        core::f64::consts::LN_2 + self.envelope_constant() / self.alpha * (1.0 + 1.0 / (self.t * self.t * self.t))
    }

    /// `C₁²/(2kC₂T₃¹) + kC₂N²T₃¹/2 − C₁N`, non-negative by Young's inequality.
    pub fn young_gap(&self, n: f64) -> f64 {
        let k = self.k_alpha;
        self.c1 * self.c1 / (2.0 * k * self.c2 * self.t31) + k * self.c2 * n * n * self.t31 / 2.0 - self.c1 * n
    }

    /// `ln(e^{C₁(N+1)} a + 2e^{C₁(N+1) + C₃ − C₂N²T₃¹} b)` for the split at
    /// frequency `N`.
    pub fn ln_split_bound(&self, n: f64, norm_gt_omega: f64, norm_g0: f64) -> f64 {
        let spectral = self.c1 * (n + 1.0);
        let a = spectral + math::ln(norm_gt_omega);
        let b = core::f64::consts::LN_2 + spectral + self.c3 - self.c2 * n * n * self.t31 + math::ln(norm_g0);
        math::log_add_exp(a, b)
    }
}

/// Minimum of `ε ↦ a·ε^{−k} + b·ε` over `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpsilonMinimum {
    pub eps_star: f64,
    pub min_value: f64,
    /// `a = 0`: the infimum `0` is approached as `ε → 0` and not attained.
    pub boundary: bool,
}

/// `ε* = (ka/b)^{1/(k+1)}`, minimum `a^{1/(k+1)} b^{k/(k+1)} (k^{1/(k+1)} + k^{−k/(k+1)})`.
pub fn epsilon_minimize(a: f64, b: f64, k: f64) -> Result<EpsilonMinimum> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::param("a", format!("must be finite and ≥ 0, got {a}")));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::param("b", format!("must be finite and > 0, got {b}")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::param("k", format!("must be finite and > 0, got {k}")));
    }
    if a == 0.0 {
        return Ok(EpsilonMinimum { eps_star: 0.0, min_value: 0.0, boundary: true });
    }
    let p = 1.0 / (k + 1.0);
    let q = k / (k + 1.0);
    let ln_k = math::ln(k);
    let eps_star = math::exp(p * (ln_k + math::ln(a) - math::ln(b)));
    let factor = math::exp(p * ln_k) + math::exp(-q * ln_k);
    let min_value = math::exp(p * math::ln(a) + q * math::ln(b)) * factor;
    Ok(EpsilonMinimum { eps_star, min_value, boundary: false })
}

/// The assembled right-hand side and its audit trail.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterpolationBound {
    /// `ln(C̃₁ · min_ε[ε^{−k} a + ε b])`.
    pub ln_rhs: f64,
    pub eps: EpsilonMinimum,
    /// Relative gap between `min_ε[…]` and `(k^{1−α} + k^{−α}) a^{1−α} b^α`.
    pub product_form_error: f64,
    /// Split frequency minimizing the two-term bound, and that bound's log.
    pub best_n: f64,
    pub ln_split_bound: f64,
}

impl InterpolationBound {
    pub fn rhs(&self) -> f64 {
        math::exp(self.ln_rhs)
    }
}

/// `C̃₁ · min_ε [ε^{−k(α)} ‖g(T)‖_ω + ε ‖g₀‖]`, with the `(1−α, α)` product
/// form cross-checked and the best direct frequency split recorded.
pub fn assemble_interpolation_bound(
    ledger: &ConstantLedger,
    norm_gt_omega: f64,
    norm_g0: f64,
) -> Result<InterpolationBound> {
    if !(norm_g0 > 0.0) {
        return Err(Error::param("norm_g0", format!("must be > 0, got {norm_g0}")));
    }
    let eps = epsilon_minimize(norm_gt_omega, norm_g0, ledger.k_alpha)?;
    let alpha = ledger.alpha;
    let k = ledger.k_alpha;
    let (ln_min, product_form_error) = if eps.boundary {
        (f64::NEG_INFINITY, 0.0)
    } else {
        let ln_factor = math::ln(math::powf(k, 1.0 - alpha) + math::powf(k, -alpha));
        let ln_product = (1.0 - alpha) * math::ln(norm_gt_omega) + alpha * math::ln(norm_g0) + ln_factor;
        let ln_min = math::ln(eps.min_value);
        (ln_min, math::abs(math::exp(ln_min - ln_product) - 1.0))
    };
    let (best_n, ln_split_bound) = if norm_gt_omega > 0.0 {
        best_split(ledger, norm_gt_omega, norm_g0)
    } else {
        (f64::INFINITY, f64::NEG_INFINITY)
    };
    Ok(InterpolationBound { ln_rhs: ledger.ln_c_tilde1 + ln_min, eps, product_form_error, best_n, ln_split_bound })
}

/// Scan then golden-section refine the split frequency.
fn best_split(ledger: &ConstantLedger, a: f64, b: f64) -> (f64, f64) {
    let f = |n: f64| ledger.ln_split_bound(n, a, b);
    // beyond this the tail term is negligible and the spectral term grows
    let hi = 10.0
        + 2.0 * ledger.c1 / (ledger.c2 * ledger.t31)
        + math::sqrt((60.0 + math::abs(math::ln(b / a)) + ledger.c3) / (ledger.c2 * ledger.t31));
    let samples = 400;
    let mut best = (0.0, f(0.0));
    for i in 1..=samples {
        let n = hi * i as f64 / samples as f64;
        let v = f(n);
        if v < best.1 {
            best = (n, v);
        }
    }
    let step = hi / samples as f64;
    let (x, v) = math::golden_section(f, (best.0 - step).max(0.0), best.0 + step, 1e-12);
    if v < best.1 {
        (x, v)
    } else {
        best
    }
}
