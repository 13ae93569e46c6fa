//! Periodic phase-space grids, sampled fields and quadrature norms.
//!
//! The physical box is `[−L, L)^{2d}` with `M` nodes per axis at
//! `z_j = −L + j·h`, `h = 2L/M`. The dual grid has spacing `Δζ = π/L` and is
//! stored in FFT order (`0, 1, …, M/2−1, −M/2, …, −1`). Axes are ordered
//! `x_1..x_d, v_1..v_d`, row-major (last axis fastest).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Largest phase-space dimension the grid backend supports (`d = 2`).
pub const MAX_AXES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseGrid {
    d: usize,
    points: usize,
    half_width: f64,
}

impl PhaseGrid {
    pub fn new(d: usize, points_per_axis: usize, half_width: f64) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(Error::Unsupported(format!("grid backend supports d ∈ {{1, 2}}, got d = {d}")));
        }
        if points_per_axis < 2 || points_per_axis % 2 != 0 {
            return Err(Error::param("points_per_axis", format!("must be even and ≥ 2, got {points_per_axis}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::param("half_width", format!("must be positive and finite, got {half_width}")));
        }
        Ok(PhaseGrid { d, points: points_per_axis, half_width })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Phase-space dimension `n = 2d`.
    pub fn axes(&self) -> usize {
        2 * self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Total number of nodes, `M^{2d}`.
    pub fn len(&self) -> usize {
        self.points.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical spacing `h = 2L/M`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Dual spacing `Δζ = π/L`.
    pub fn dual_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Largest representable frequency magnitude per axis, `π/h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Radius of the smallest ball containing the whole dual grid.
    pub fn nyquist_radius(&self) -> f64 {
        self.nyquist() * math::sqrt(self.axes() as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        math::powi(self.spacing(), self.axes() as i32)
    }

    pub fn dual_cell_volume(&self) -> f64 {
        math::powi(self.dual_spacing(), self.axes() as i32)
    }

    pub fn box_volume(&self) -> f64 {
        math::powi(2.0 * self.half_width, self.axes() as i32)
    }

    #[inline]
    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Signed frequency index of FFT-ordered position `j`.
    #[inline]
    pub fn signed_index(&self, j: usize) -> isize {
        if j < self.points / 2 {
            j as isize
        } else {
            j as isize - self.points as isize
        }
    }

    #[inline]
    pub fn frequency(&self, j: usize) -> f64 {
        self.signed_index(j) as f64 * self.dual_spacing()
    }

    /// Per-axis indices of flat index `idx`.
    #[inline]
    pub fn unravel(&self, mut idx: usize) -> [usize; MAX_AXES] {
        let mut out = [0usize; MAX_AXES];
        let n = self.axes();
        for a in (0..n).rev() {
            out[a] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    /// Physical coordinates of node `idx`, written into `z[..2d]`.
    #[inline]
    pub fn node(&self, idx: usize, z: &mut [f64]) {
        let ix = self.unravel(idx);
        for a in 0..self.axes() {
            z[a] = self.coordinate(ix[a]);
        }
    }

    /// Frequency coordinates of dual node `idx`, written into `zeta[..2d]`.
    #[inline]
    pub fn dual_node(&self, idx: usize, zeta: &mut [f64]) {
        let ix = self.unravel(idx);
        for a in 0..self.axes() {
            zeta[a] = self.frequency(ix[a]);
        }
    }

    /// Stride (in flat index units) of axis `a`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.axes() - 1 - axis) as u32)
    }

    fn check_same(&self, other: &PhaseGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn sum_sq(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).sum()
}

/// Fraction of `Σ|u|²` carried by nodes within `layer` nodes of an edge of
/// the index cube (`edge_low`: indices `< layer`; `edge_high`: `≥ M − layer`).
fn edge_fraction(grid: &PhaseGrid, values: &[Complex64], in_layer: impl Fn(usize) -> bool) -> f64 {
    let n = grid.axes();
    let mut edge = 0.0;
    let mut total = 0.0;
    for (idx, v) in values.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        let ix = grid.unravel(idx);
        if ix[..n].iter().any(|&j| in_layer(j)) {
            edge += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        edge / total
    }
}

fn layer_width(grid: &PhaseGrid) -> usize {
    (grid.points / 16).max(1)
}

/// Sampled `g(x, v)` on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl PhaseField {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        check_finite(&values)?;
        Ok(PhaseField { grid, values })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        PhaseField { grid, values: alloc::vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Sample `f` at every node. `f` receives the `2d` physical coordinates.
    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let n = grid.axes();
        let mut z = [0.0; MAX_AXES];
        let values = (0..grid.len())
            .map(|idx| {
                grid.node(idx, &mut z);
                f(&z[..n])
            })
            .collect();
        Self::new(grid, values)
    }

    pub(crate) fn from_raw(grid: PhaseGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        PhaseField { grid, values }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `‖f‖_{L²(box)}`, or `‖f‖_{L²(ω ∩ box)}` when a phase-space mask is given.
    pub fn l2_norm(&self, mask: Option<&GridMask>) -> Result<f64> {
        Ok(math::sqrt(self.grid.cell_volume() * masked_sum_sq(&self.grid, &self.values, mask, Space::Phase)?))
    }

    /// Energy fraction in the outer layer (`max(1, M/16)` nodes) of the box.
    pub fn boundary_energy_fraction(&self) -> f64 {
        let m = self.grid.points;
        let w = layer_width(&self.grid);
        edge_fraction(&self.grid, &self.values, |j| j < w || j >= m - w)
    }

    /// Refuse fields whose boundary energy fraction exceeds `tolerance`.
    pub fn check_boundary(&self, tolerance: f64) -> Result<f64> {
        let fraction = self.boundary_energy_fraction();
        if fraction > tolerance {
            return Err(Error::BoundaryEnergy { fraction, tolerance });
        }
        Ok(fraction)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PhaseField { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &PhaseField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(PhaseField { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &PhaseField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(PhaseField { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    /// `⟨f, g⟩ = ∫ f ḡ` by the same quadrature as [`PhaseField::l2_norm`].
    pub fn inner(&self, other: &PhaseField) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Relative L² distance `‖self − reference‖ / ‖reference‖`.
    pub fn relative_error(&self, reference: &PhaseField) -> Result<f64> {
        self.grid.check_same(&reference.grid)?;
        let diff: f64 = self.values.iter().zip(&reference.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(math::sqrt(diff / sum_sq(&reference.values)))
    }
}

/// Sampled `ĝ(ξ, η)` on the dual grid of a [`PhaseGrid`], FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        check_finite(&values)?;
        Ok(SpectralField { grid, values })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        SpectralField { grid, values: alloc::vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Sample `f` at every dual node. `f` receives the `2d` frequencies.
    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let n = grid.axes();
        let mut zeta = [0.0; MAX_AXES];
        let values = (0..grid.len())
            .map(|idx| {
                grid.dual_node(idx, &mut zeta);
                f(&zeta[..n])
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at the zero frequency.
    pub fn dc(&self) -> Complex64 {
        self.values[0]
    }

    /// `‖ĝ‖_{L²}` over the dual box (optionally masked by a spectral mask).
    pub fn l2_norm(&self, mask: Option<&GridMask>) -> Result<f64> {
        Ok(math::sqrt(self.mass_masked(mask)?))
    }

    fn mass_masked(&self, mask: Option<&GridMask>) -> Result<f64> {
        Ok(self.grid.dual_cell_volume() * masked_sum_sq(&self.grid, &self.values, mask, Space::Spectral)?)
    }

    /// Squared spectral mass `∫|ĝ|²`.
    pub fn mass(&self) -> f64 {
        self.grid.dual_cell_volume() * sum_sq(&self.values)
    }

    /// Zero every node with `|ζ| > radius`. Idempotent, and the origin always
    /// survives (`|ζ| ≤ N` is inclusive).
    pub fn band_project(&self, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::param("N", format!("band radius must be ≥ 0, got {radius}")));
        }
        let n = self.grid.axes();
        let r2 = radius * radius;
        let mut zeta = [0.0; MAX_AXES];
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                self.grid.dual_node(idx, &mut zeta);
                let s: f64 = zeta[..n].iter().map(|c| c * c).sum();
                if s <= r2 {
                    *v
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(SpectralField { grid: self.grid, values })
    }

    /// `∫_{|ζ|≤N} |ĝ|²`.
    pub fn band_mass(&self, radius: f64) -> f64 {
        self.split_mass(radius).0
    }

    /// `∫_{|ζ|>N} |ĝ|²`.
    pub fn tail_mass(&self, radius: f64) -> f64 {
        self.split_mass(radius).1
    }

    fn split_mass(&self, radius: f64) -> (f64, f64) {
        let n = self.grid.axes();
        let r2 = radius * radius;
        let mut zeta = [0.0; MAX_AXES];
        let (mut band, mut tail) = (0.0, 0.0);
        for (idx, v) in self.values.iter().enumerate() {
            self.grid.dual_node(idx, &mut zeta);
            let s: f64 = zeta[..n].iter().map(|c| c * c).sum();
            if s <= r2 {
                band += v.norm_sqr();
            } else {
                tail += v.norm_sqr();
            }
        }
        let dv = self.grid.dual_cell_volume();
        (band * dv, tail * dv)
    }

    /// Energy fraction within `max(1, M/16)` nodes of the Nyquist edge.
    pub fn edge_energy_fraction(&self) -> f64 {
        let grid = self.grid;
        let w = layer_width(&grid) as isize;
        let half = (grid.points / 2) as isize;
        edge_fraction(&grid, &self.values, |j| grid.signed_index(j).abs() >= half - w)
    }
}

/// Which grid a mask lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Space {
    Phase,
    Spectral,
}

/// 0/1 indicator sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    grid: PhaseGrid,
    space: Space,
    bits: Vec<bool>,
}

impl GridMask {
    pub fn new(grid: PhaseGrid, space: Space, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::GridMismatch(format!("mask has {} samples, grid has {}", bits.len(), grid.len())));
        }
        Ok(GridMask { grid, space, bits })
    }

    pub fn full(grid: PhaseGrid, space: Space) -> Self {
        GridMask { grid, space, bits: alloc::vec![true; grid.len()] }
    }

    /// Phase-space mask from a membership predicate on node coordinates.
    pub fn from_predicate(grid: PhaseGrid, mut inside: impl FnMut(&[f64]) -> bool) -> Self {
        let n = grid.axes();
        let mut z = [0.0; MAX_AXES];
        let bits = (0..grid.len())
            .map(|idx| {
                grid.node(idx, &mut z);
                inside(&z[..n])
            })
            .collect();
        GridMask { grid, space: Space::Phase, bits }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Quadrature measure of the mask, `count · h^{2d}` (or `Δζ^{2d}`).
    pub fn measure(&self) -> f64 {
        let cell = match self.space {
            Space::Phase => self.grid.cell_volume(),
            Space::Spectral => self.grid.dual_cell_volume(),
        };
        self.count() as f64 * cell
    }

    /// True when every sample of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &GridMask) -> bool {
        self.grid == other.grid && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    /// Mask as a 0/1 phase field (for snapshot export).
    pub fn to_field(&self) -> PhaseField {
        PhaseField::from_raw(
            self.grid,
            self.bits.iter().map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect(),
        )
    }
}

fn masked_sum_sq(grid: &PhaseGrid, values: &[Complex64], mask: Option<&GridMask>, space: Space) -> Result<f64> {
    match mask {
        None => Ok(sum_sq(values)),
        Some(m) => {
            if m.grid != *grid {
                return Err(Error::GridMismatch(format!("mask grid {:?} vs field grid {:?}", m.grid, grid)));
            }
            if m.space != space {
                return Err(Error::GridMismatch(format!("{:?} mask applied to a {:?} field", m.space, space)));
            }
            Ok(values.iter().zip(&m.bits).filter(|(_, b)| **b).map(|(v, _)| v.norm_sqr()).sum())
        }
    }
}

/// Full, restricted, band and tail norms of one field.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormReport {
    /// `‖g‖_{L²}` (physical).
    pub full_norm: f64,
    /// `‖g‖_{L²(ω)}` (physical).
    pub restricted_norm: f64,
    /// `‖χ_{B_N} ĝ‖` (spectral).
    pub band_norm: f64,
    /// `‖χ_{B_N^c} ĝ‖` (spectral).
    pub tail_norm: f64,
}

impl NormReport {
    pub fn new(field: &PhaseField, spectral: &SpectralField, mask: &GridMask, band_radius: f64) -> Result<Self> {
        field.grid.check_same(&spectral.grid)?;
        let (band, tail) = spectral.split_mass(band_radius);
        Ok(NormReport {
            full_norm: field.l2_norm(None)?,
            restricted_norm: field.l2_norm(Some(mask))?,
            band_norm: math::sqrt(band),
            tail_norm: math::sqrt(tail),
        })
    }
}
