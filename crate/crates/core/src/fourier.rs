//! Multi-axis discrete Fourier transforms with the continuous-transform
//! normalization of the crate:
//!
//! ```text
//! F_k = h^{n} (−1)^{|k|} DFT[f]_k          (≈ ∫ f e^{−iz·ζ_k} dz)
//! f_j = (Δζ/2π)^{n} (−1)^{|k|} IDFT[F]_j   (≈ (2π)^{−n} ∫ F e^{iz_j·ζ} dζ)
//! ```
//!
//! The `(−1)^{|k|}` factor accounts for the box starting at `−L`. With these
//! factors the discrete Plancherel identity `Δζ^n Σ|F|² = (2π)^n h^n Σ|f|²`
//! holds exactly.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{PhaseField, PhaseGrid, SpectralField};
use crate::math;

/// Unnormalized in-place 1-D DFT of a fixed length.
///
/// Forward engines compute `Σ_j a_j e^{−2πijk/M}`, inverse engines
/// `Σ_k a_k e^{+2πijk/M}`.
pub trait LineTransform: Send + Sync {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn process(&self, line: &mut [Complex64]);
}

#[cfg(feature = "std")]
struct RustFftLine(Arc<dyn rustfft::Fft<f64>>);

#[cfg(feature = "std")]
impl LineTransform for RustFftLine {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn process(&self, line: &mut [Complex64]) {
        self.0.process(line);
    }
}

/// Forward/inverse transforms for one [`PhaseGrid`].
#[derive(Clone)]
pub struct FourierPlan {
    grid: PhaseGrid,
    forward: Arc<dyn LineTransform>,
    inverse: Arc<dyn LineTransform>,
}

impl core::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FourierPlan").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl FourierPlan {
    #[cfg(feature = "std")]
    pub fn new(grid: PhaseGrid) -> Self {
        let mut planner = rustfft::FftPlanner::<f64>::new();
        let m = grid.points_per_axis();
        FourierPlan {
            grid,
            forward: Arc::new(RustFftLine(planner.plan_fft_forward(m))),
            inverse: Arc::new(RustFftLine(planner.plan_fft_inverse(m))),
        }
    }

    /// Build a plan from caller-supplied 1-D engines (the `no_std` route).
    pub fn with_engines(
        grid: PhaseGrid,
        forward: Arc<dyn LineTransform>,
        inverse: Arc<dyn LineTransform>,
    ) -> Result<Self> {
        let m = grid.points_per_axis();
        if forward.len() != m || inverse.len() != m {
            return Err(Error::GridMismatch(alloc::format!(
                "engine lengths ({}, {}) do not match {m} points per axis",
                forward.len(),
                inverse.len()
            )));
        }
        Ok(FourierPlan { grid, forward, inverse })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    fn check(&self, grid: &PhaseGrid) -> Result<()> {
        if *grid != self.grid {
            return Err(Error::GridMismatch(alloc::format!("plan for {:?} used on {:?}", self.grid, grid)));
        }
        Ok(())
    }

    /// `f ↦ f̂` with `f̂(ζ) = ∫ f(z) e^{−iz·ζ} dz`.
    pub fn forward(&self, f: &PhaseField) -> Result<SpectralField> {
        self.check(f.grid())?;
        let mut data = f.values().to_vec();
        let axes: Vec<usize> = (0..self.grid.axes()).collect();
        self.forward_axes(&mut data, &axes);
        let scale = self.grid.cell_volume();
        apply_sign_and_scale(&self.grid, &mut data, &axes, scale);
        SpectralField::new(self.grid, data)
    }

    /// `F ↦ (2π)^{−2d} ∫ F(ζ) e^{iz·ζ} dζ`.
    pub fn inverse(&self, spectral: &SpectralField) -> Result<PhaseField> {
        self.check(spectral.grid())?;
        let mut data = spectral.values().to_vec();
        let axes: Vec<usize> = (0..self.grid.axes()).collect();
        apply_sign_and_scale(&self.grid, &mut data, &axes, 1.0);
        self.inverse_axes(&mut data, &axes);
        let n = self.grid.axes() as i32;
        let scale = math::powi(self.grid.dual_spacing() / (2.0 * core::f64::consts::PI), n);
        for v in &mut data {
            *v *= scale;
        }
        PhaseField::new(self.grid, data)
    }

    /// Continuous-normalized forward transform along a subset of axes, in place.
    /// Used by the propagator for the mixed `(ξ, v)` representation.
    pub(crate) fn forward_partial(&self, data: &mut [Complex64], axes: &[usize]) {
        self.forward_axes(data, axes);
        let scale = math::powi(self.grid.spacing(), axes.len() as i32);
        apply_sign_and_scale(&self.grid, data, axes, scale);
    }

    /// Inverse of [`FourierPlan::forward_partial`].
    pub(crate) fn inverse_partial(&self, data: &mut [Complex64], axes: &[usize]) {
        apply_sign_and_scale(&self.grid, data, axes, 1.0);
        self.inverse_axes(data, axes);
        let scale = math::powi(self.grid.dual_spacing() / (2.0 * core::f64::consts::PI), axes.len() as i32);
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn forward_axes(&self, data: &mut [Complex64], axes: &[usize]) {
        for &a in axes {
            transform_axis(&self.grid, data, a, self.forward.as_ref());
        }
    }

    fn inverse_axes(&self, data: &mut [Complex64], axes: &[usize]) {
        for &a in axes {
            transform_axis(&self.grid, data, a, self.inverse.as_ref());
        }
    }
}

fn transform_axis(grid: &PhaseGrid, data: &mut [Complex64], axis: usize, engine: &dyn LineTransform) {
    let m = grid.points_per_axis();
    let stride = grid.stride(axis);
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    if stride == 1 {
        for chunk in data.chunks_exact_mut(m) {
            engine.process(chunk);
        }
        return;
    }
    let block = stride * m;
    for outer in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[base + k * stride];
            }
            engine.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

/// Multiply by `scale · (−1)^{Σ_{a∈axes} k_a}`.
fn apply_sign_and_scale(grid: &PhaseGrid, data: &mut [Complex64], axes: &[usize], scale: f64) {
    for (idx, v) in data.iter_mut().enumerate() {
        let ix = grid.unravel(idx);
        let parity: usize = axes.iter().map(|&a| ix[a]).sum();
        let s = if parity % 2 == 0 { scale } else { -scale };
        *v *= s;
    }
}

/// One-shot forward transform (builds a plan).
#[cfg(feature = "std")]
pub fn fourier_forward(f: &PhaseField) -> Result<SpectralField> {
    FourierPlan::new(*f.grid()).forward(f)
}

/// One-shot inverse transform (builds a plan).
#[cfg(feature = "std")]
pub fn fourier_inverse(spectral: &SpectralField) -> Result<PhaseField> {
    FourierPlan::new(*spectral.grid()).inverse(spectral)
}
