use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::symbol::completed_square;
use crate::error::{Error, Result};
use crate::fourier::FourierPlan;
use crate::grid::{PhaseField, MAX_AXES};
use crate::math;

/// Numerical guards of the grid pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    /// Largest tolerated energy fraction in the outer layer of the box, for
    /// both input and output. `None` for genuinely periodic data.
    pub boundary_tolerance: Option<f64>,
    /// Largest tolerated energy fraction of `ĝ₀` that the shear pushes past
    /// (or within one layer of) the Nyquist edge.
    pub alias_tolerance: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards { boundary_tolerance: Some(1e-8), alias_tolerance: 1e-8 }
    }
}

impl Guards {
    /// Guards for data that is periodic on the box (no boundary check).
    pub fn periodic() -> Self {
        Guards { boundary_tolerance: None, ..Guards::default() }
    }
}

/// [`propagate_grid_with`] under the default guards.
pub fn propagate_grid(plan: &FourierPlan, f: &PhaseField, t: f64) -> Result<PhaseField> {
    propagate_grid_with(plan, f, t, &Guards::default())
}

/// Exact grid solution operator.
///
/// FFT in `x` → modulation `e^{−itξ·v}` in the mixed `(ξ, v)` representation
/// (this realizes `ĝ₀(ξ, η + ξt)` without resampling) → FFT in `v` →
/// multiplier `e^{−t|η+ξt/2|² − t³|ξ|²/12}` → inverse FFTs.
pub fn propagate_grid_with(plan: &FourierPlan, f: &PhaseField, t: f64, guards: &Guards) -> Result<PhaseField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("time must be finite and ≥ 0, got {t}")));
    }
    let grid = *f.grid();
    if *plan.grid() != grid {
        return Err(Error::GridMismatch(format!("plan for {:?} used on {:?}", plan.grid(), grid)));
    }
    if let Some(tol) = guards.boundary_tolerance {
        f.check_boundary(tol)?;
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let d = grid.d();
    let n = grid.axes();
    let x_axes: Vec<usize> = (0..d).collect();
    let v_axes: Vec<usize> = (d..n).collect();

    let mut data = f.values().to_vec();
    plan.forward_partial(&mut data, &x_axes);

    let mut full = data.clone();
    plan.forward_partial(&mut full, &v_axes);
    alias_guard(&grid, &full, t, guards.alias_tolerance)?;
    drop(full);

    let mut ix_coords = [0.0; MAX_AXES];
    for (idx, value) in data.iter_mut().enumerate() {
        let ix = grid.unravel(idx);
        for a in 0..d {
            ix_coords[a] = grid.frequency(ix[a]);
            ix_coords[d + a] = grid.coordinate(ix[d + a]);
        }
        let phase: f64 = (0..d).map(|a| ix_coords[a] * ix_coords[d + a]).sum();
        if phase != 0.0 {
            *value *= math::cis(-t * phase);
        }
    }

    plan.forward_partial(&mut data, &v_axes);

    let mut zeta = [0.0; MAX_AXES];
    for (idx, value) in data.iter_mut().enumerate() {
        grid.dual_node(idx, &mut zeta);
        let q = completed_square(t, &zeta[..d], &zeta[d..n]);
        if q != 0.0 {
            *value *= math::exp(-q);
        }
    }

    let all: Vec<usize> = (0..n).collect();
    plan.inverse_partial(&mut data, &all);
    let out = PhaseField::new(grid, data)?;
    if let Some(tol) = guards.boundary_tolerance {
        out.check_boundary(tol)?;
    }
    Ok(out)
}

/// Reject shears that move non-negligible energy of `ĝ₀` across the Nyquist
/// edge: for each `ξ`, grid values `ĝ₀(ξ, η')` with `η' − ξt` outside the dual
/// box (minus one guard layer) would wrap around.
fn alias_guard(grid: &crate::grid::PhaseGrid, spectrum: &[Complex64], t: f64, tolerance: f64) -> Result<()> {
    let d = grid.d();
    let n = grid.axes();
    let layer = (grid.points_per_axis() / 16).max(1) as f64;
    let edge = grid.nyquist() - layer * grid.dual_spacing();
    let mut total = 0.0;
    let mut offending = 0.0;
    let mut worst_xi: f64 = 0.0;
    let mut zeta = [0.0; MAX_AXES];
    for (idx, v) in spectrum.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if e == 0.0 {
            continue;
        }
        grid.dual_node(idx, &mut zeta);
        let mut bad = false;
        let mut xi_norm = 0.0;
        for a in 0..d {
            let xi = zeta[a];
            let eta = zeta[d + a];
            xi_norm += xi * xi;
            if math::abs(xi) >= edge || math::abs(eta) >= edge || math::abs(eta - xi * t) >= edge {
                bad = true;
            }
        }
        if bad {
            offending += e;
            if e > tolerance * 1e-3 * total.max(e) {
                worst_xi = worst_xi.max(math::sqrt(xi_norm));
            }
        }
    }
    let _ = n;
    if total > 0.0 && offending / total > tolerance {
        return Err(Error::Aliasing { fraction: offending / total, xi_extent: worst_xi });
    }
    Ok(())
}
