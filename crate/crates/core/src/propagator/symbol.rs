use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// The Fourier symbol of the solution operator at one frequency.
///
/// `ĝ(t, ξ, η) = ĝ₀(shift) · multiplier` with `shift = (ξ, η + ξt)` and
/// `multiplier = e^{−Q}`, `Q = |η|²t + η·ξt² + |ξ|²t³/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolEvaluation {
    pub t: f64,
    /// `L_t(ξ, η) = (ξ, η + ξt)`.
    pub shift: Vec<f64>,
    /// `Q(t, ξ, η) ≥ 0`, evaluated as `t|η + ξt/2|² + t³|ξ|²/12`.
    pub exponent: f64,
    pub multiplier: f64,
}

/// Evaluate the symbol at `zeta = (ξ_1..ξ_d, η_1..η_d)`.
pub fn symbol(t: f64, zeta: &[f64]) -> Result<SymbolEvaluation> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("time must be finite and ≥ 0, got {t}")));
    }
    if zeta.is_empty() || zeta.len() % 2 != 0 {
        return Err(Error::param("zeta", format!("expected 2d coordinates, got {}", zeta.len())));
    }
    let d = zeta.len() / 2;
    let (xi, eta) = zeta.split_at(d);
    let shift = xi.iter().copied().chain(eta.iter().zip(xi).map(|(e, x)| e + x * t)).collect();
    let exponent = completed_square(t, xi, eta);
    Ok(SymbolEvaluation { t, shift, exponent, multiplier: math::exp(-exponent) })
}

/// `t|η + ξt/2|² + t³|ξ|²/12`; no cancellation for large `|ζ|`.
#[inline]
pub(crate) fn completed_square(t: f64, xi: &[f64], eta: &[f64]) -> f64 {
    let mut shifted = 0.0;
    let mut xi2 = 0.0;
    for (x, e) in xi.iter().zip(eta) {
        let s = e + 0.5 * t * x;
        shifted += s * s;
        xi2 += x * x;
    }
    t * shifted + t * t * t * xi2 / 12.0
}

/// `|η|²t + η·ξt² + |ξ|²t³/3`, term by term (reference form).
pub fn expanded_exponent(t: f64, xi: &[f64], eta: &[f64]) -> f64 {
    let eta2: f64 = eta.iter().map(|e| e * e).sum();
    let cross: f64 = eta.iter().zip(xi).map(|(e, x)| e * x).sum();
    let xi2: f64 = xi.iter().map(|x| x * x).sum();
    eta2 * t + cross * t * t + xi2 * t * t * t / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_time_zero() {
        let s = symbol(0.0, &[1.5, -2.0]).unwrap();
        assert_eq!(s.shift, [1.5, -2.0]);
        assert_eq!(s.multiplier, 1.0);
    }

    #[test]
    fn substitution_examples() {
        let s = symbol(1.0, &[0.0, 2.0]).unwrap();
        assert_eq!(s.shift, [0.0, 2.0]);
        assert!((s.exponent - 4.0).abs() < 1e-15);
        assert!((s.multiplier - (-4.0f64).exp()).abs() < 1e-16);

        let s = symbol(2.0, &[1.0, 1.0]).unwrap();
        assert_eq!(s.shift, [1.0, 3.0]);
        assert!((s.exponent - 26.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(symbol(-0.1, &[0.0, 0.0]).is_err());
        assert!(symbol(1.0, &[0.0]).is_err());
    }

    #[test]
    fn multiplier_in_unit_interval() {
        for (t, z) in [(0.3, [0.1, -0.2]), (5.0, [3.0, 1.0]), (1.0, [-1.0, 0.5])] {
            let m = symbol(t, &z).unwrap().multiplier;
            assert!(m > 0.0 && m <= 1.0);
        }
    }
}
