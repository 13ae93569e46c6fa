use alloc::format;

use crate::error::{Error, Result};
use crate::grid::{GridMask, PhaseGrid};
use crate::lab::ledger::{assemble_interpolation_bound, ConstantLedger, InterpolationBound};
use crate::math;
use crate::mixture::{next_smooth_even, GaussianMixtureState};
use crate::propagator::DecayConstants;
use crate::thickness::ThickSetDescriptor;

/// Quadrature grid for restricted norms.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyOptions {
    /// Upper bound on the node spacing (the indicator of `ω` limits accuracy
    /// to first order in this spacing).
    pub max_spacing: f64,
    /// Energy allowed outside the box and outside the Nyquist band.
    pub tolerance: f64,
    pub max_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_spacing: 0.025, tolerance: 1e-12, max_points: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterpolationReport {
    pub t: f64,
    pub alpha: f64,
    pub c1: f64,
    pub norm_g0: f64,
    /// `‖g(T)‖`.
    pub lhs: f64,
    pub norm_gt_omega: f64,
    /// Assembled right-hand side `C̃₁ · min_ε[…]` (may be `+∞`).
    pub rhs: f64,
    pub ln_rhs: f64,
    /// Smallest `C` with `lhs ≤ e^{C/α(1+1/T³)} ‖g(T)‖_ω^{1−α} ‖g₀‖^α`.
    pub observed_constant: f64,
    /// `(C₁+C₂+C₃)²/C₂`.
    pub envelope_constant: f64,
    pub bound: InterpolationBound,
    /// Node spacing used for `‖g(T)‖_ω` (0 when computed exactly).
    pub spacing: f64,
}

impl InterpolationReport {
    pub fn holds(&self) -> bool {
        math::ln(self.lhs) <= self.ln_rhs
    }
}

/// Propagate `g0` exactly to `T`, measure the three norms and compare with
/// the assembled bound for spectral constant `c1`.
pub fn verify_interpolation(
    g0: &GaussianMixtureState,
    set: &ThickSetDescriptor,
    t: f64,
    alpha: f64,
    c1: f64,
    decay: &DecayConstants,
    options: &VerifyOptions,
) -> Result<InterpolationReport> {
    let ledger = ConstantLedger::new(c1, decay, alpha, t)?;
    set.validate()?;
    if let Some(n) = set.dimension() {
        if n != g0.axes() {
            return Err(Error::GridMismatch(format!("set has {n} axes, data has {}", g0.axes())));
        }
    }
    let gt = g0.propagate(t)?;
    let norm_g0 = g0.physical_norm();
    let lhs = gt.physical_norm();
    if !(norm_g0 > 0.0) {
        return Err(Error::param("g0", "initial data must be nonzero"));
    }
    let (norm_gt_omega, spacing) = restricted_norm(&gt, set, options)?;
    if !(norm_gt_omega > 0.0) {
        return Err(Error::ZeroRestrictedNorm);
    }
    let bound = assemble_interpolation_bound(&ledger, norm_gt_omega, norm_g0)?;
    let geometric = (1.0 - alpha) * math::ln(norm_gt_omega) + alpha * math::ln(norm_g0);
    let observed_constant = alpha * (math::ln(lhs) - geometric) / (1.0 + 1.0 / (t * t * t));
    Ok(InterpolationReport {
        t,
        alpha,
        c1,
        norm_g0,
        lhs,
        norm_gt_omega,
        rhs: bound.rhs(),
        ln_rhs: bound.ln_rhs,
        observed_constant,
        envelope_constant: ledger.envelope_constant(),
        bound,
        spacing,
    })
}

/// `‖g‖_{L²(ω)}` by the rectangle rule on a grid fitted to `g`, evaluating the
/// closed form node by node. Returns the norm and the node spacing.
pub fn restricted_norm(
    g: &GaussianMixtureState,
    set: &ThickSetDescriptor,
    options: &VerifyOptions,
) -> Result<(f64, f64)> {
    if *set == ThickSetDescriptor::FullSpace {
        return Ok((g.physical_norm(), 0.0));
    }
    let grid = g.fitted_grid(options.max_spacing, options.tolerance, options.max_points)?;
    Ok((restricted_norm_on(g, set, &grid)?, grid.spacing()))
}

/// `‖g‖_{L²(ω)}` by the rectangle rule on `grid`.
pub fn restricted_norm_on(g: &GaussianMixtureState, set: &ThickSetDescriptor, grid: &PhaseGrid) -> Result<f64> {
    let sum = g.physical_sq_sum(grid, |_, z| set.contains(z))?;
    Ok(math::sqrt(sum * grid.cell_volume()))
}

/// `‖g‖_{L²(ω)}` by the rectangle rule over the nodes of a precomputed mask.
pub fn restricted_norm_masked(g: &GaussianMixtureState, mask: &GridMask) -> Result<f64> {
    let bits = mask.bits();
    let sum = g.physical_sq_sum(mask.grid(), |idx, _| bits[idx])?;
    Ok(math::sqrt(sum * mask.grid().cell_volume()))
}

/// One grid fitted to every state in `states`: the widest box at the finest
/// spacing. Keeping the nodes fixed makes `t ↦ ‖g(t)‖_ω` smooth along a
/// trajectory.
pub fn covering_grid(states: &[GaussianMixtureState], options: &VerifyOptions) -> Result<PhaseGrid> {
    let mut half_width: f64 = 0.0;
    let mut spacing = f64::INFINITY;
    let mut d = 1;
    for s in states {
        let g = s.fitted_grid(options.max_spacing, options.tolerance, options.max_points)?;
        half_width = half_width.max(g.half_width());
        spacing = spacing.min(g.spacing());
        d = g.d();
    }
    let points = next_smooth_even(math::ceil(2.0 * half_width / spacing) as usize);
    if points > options.max_points {
        return Err(Error::GridTooLarge(format!(
            "trajectory needs {points} points per axis (box half-width {half_width:.3}, spacing {spacing:.4}); cap is {}",
            options.max_points
        )));
    }
    PhaseGrid::new(d, points, half_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::GaussianTerm;
    use num_complex::Complex64;

    fn data() -> GaussianMixtureState {
        GaussianMixtureState::new(
            1,
            alloc::vec![GaussianTerm::isotropic(Complex64::new(1.0, 0.0), &[0.3, -0.2], 0.8).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn full_space_constant_is_nonpositive() {
        let k = DecayConstants::explicit(1);
        for alpha in [0.25, 0.5, 0.9] {
            let r = verify_interpolation(
                &data(),
                &ThickSetDescriptor::FullSpace,
                1.0,
                alpha,
                0.0,
                &k,
                &VerifyOptions::default(),
            )
            .unwrap();
            assert!(r.observed_constant <= 0.0);
            assert!(r.holds());
        }
    }

    #[test]
    fn balls_hold_with_large_c1() {
        let k = DecayConstants::explicit(1);
        let set = ThickSetDescriptor::lattice_balls(2, 1.0, 0.3);
        let opts = VerifyOptions { max_spacing: 0.05, ..VerifyOptions::default() };
        let r = verify_interpolation(&data(), &set, 0.5, 0.5, 2.0, &k, &opts).unwrap();
        assert!(r.norm_gt_omega < r.lhs);
        assert!(r.holds());
        assert!(r.observed_constant <= r.envelope_constant);
    }
}
