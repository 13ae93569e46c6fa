use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fourier::FourierPlan;
use crate::grid::{GridMask, PhaseField, Space, SpectralField, MAX_AXES};
use crate::math;
use crate::thickness::{grid_mask, ThickSetDescriptor};

/// `∫_{|ζ|≤N} |f̂|² / ∫_ω |∫_{|ζ|≤N} f̂(ζ) e^{iz·ζ} dζ|² dz` for the band
/// projection of `f`. Note the inner integral is `(2π)^{2d} f_N`, so a full
/// mask gives exactly `(2π)^{−2d}`.
pub fn spectral_ratio(plan: &FourierPlan, f: &PhaseField, mask: &GridMask, n: f64) -> Result<f64> {
    let spectral = plan.forward(f)?.band_project(n)?;
    ratio_of_band(plan, &spectral, mask)
}

fn ratio_of_band(plan: &FourierPlan, band: &SpectralField, mask: &GridMask) -> Result<f64> {
    if mask.space() != Space::Phase {
        return Err(Error::param("mask", "spectral ratio needs a phase-space mask"));
    }
    let physical = plan.inverse(band)?;
    let restricted = physical.l2_norm(Some(mask))?;
    let lhs = band.mass();
    let n = band.grid().axes() as i32;
    let rhs = math::powi(2.0 * PI, 2 * n) * restricted * restricted;
    if !(rhs > 0.0) {
        return Err(Error::ZeroRestrictedNorm);
    }
    Ok(lhs / rhs)
}

/// Sample families used by [`fit_spectral_constant`]. None of them depends on
/// the set, so ratios over nested sets compare sample by sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    /// Random complex coefficients on every dual node of `B_N`.
    pub random_samples: usize,
    /// Gaussian bumps of width `1/max(N, 1)` at uniformly drawn centers.
    pub random_bumps: usize,
    /// Extra bumps on a fixed lattice of this spacing covering the box.
    pub lattice_spacing: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { random_samples: 16, random_bumps: 16, lattice_spacing: Some(0.5) }
    }
}

impl FitOptions {
    pub fn describe(&self) -> String {
        let lattice = match self.lattice_spacing {
            Some(s) => format!("lattice bumps at spacing {s}"),
            None => String::from("no lattice bumps"),
        };
        format!(
            "{} random-coefficient samples in B_N; {} random bumps of width 1/N; {lattice}",
            self.random_samples, self.random_bumps
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralRow {
    pub n: f64,
    pub samples: usize,
    /// Largest [`spectral_ratio`] among the samples.
    pub worst_ratio: f64,
    /// `ln(worst_ratio)/(1+N)`.
    pub fitted_c: f64,
    /// Norm-form constant `ln(‖f‖/‖f‖_ω)/(1+N)` of the worst sample.
    pub norm_form_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralTestReport {
    pub set: ThickSetDescriptor,
    pub rows: Vec<SpectralRow>,
    /// `max_N ln(ratio)/(1+N)` clipped at 0, so `ratio ≤ e^{C(1+N)}`.
    pub fitted_c: f64,
    /// The same maximum before clipping.
    pub fitted_c_raw: f64,
    /// Norm-form `C₁ ≥ 0` with `‖f‖ ≤ e^{C₁(1+N)} ‖f‖_ω` on every sample.
    pub c1: f64,
    pub family: String,
    pub seed: u64,
}

/// Worst spectral ratios of band-limited samples on `set ∩ box`, for each
/// band radius in `n_list`.
pub fn fit_spectral_constant(
    plan: &FourierPlan,
    set: &ThickSetDescriptor,
    n_list: &[f64],
    options: &FitOptions,
    seed: u64,
) -> Result<SpectralTestReport> {
    let grid = *plan.grid();
    let mask = grid_mask(set, &grid)?;
    if n_list.is_empty() {
        return Err(Error::param("N_list", "at least one band radius is required"));
    }
    let axes = grid.axes();
    let ln_plancherel = axes as f64 * math::ln(2.0 * PI);
    let mut rows = Vec::with_capacity(n_list.len());
    for (stream, &n) in n_list.iter().enumerate() {
        if !(n >= 0.0) || !n.is_finite() {
            return Err(Error::param("N", format!("band radius must be finite and ≥ 0, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64 + 1);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        let mut record = |band: SpectralField| -> Result<()> {
            if band.mass() == 0.0 {
                return Ok(());
            }
            worst = worst.max(ratio_of_band(plan, &band, &mask)?);
            count += 1;
            Ok(())
        };
        for _ in 0..options.random_samples {
            let band = SpectralField::from_fn(grid, |zeta| {
                let r2: f64 = zeta.iter().map(|c| c * c).sum();
                if r2 <= n * n {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })?;
            record(band)?;
        }
        let width = 1.0 / n.max(1.0);
        let l = grid.half_width();
        let mut centers: Vec<[f64; MAX_AXES]> = Vec::new();
        for _ in 0..options.random_bumps {
            let mut c = [0.0; MAX_AXES];
            for v in c.iter_mut().take(axes) {
                *v = rng.gen_range(-l..l);
            }
            centers.push(c);
        }
        if let Some(spacing) = options.lattice_spacing {
            if !(spacing > 0.0) {
                return Err(Error::param("lattice_spacing", format!("must be > 0, got {spacing}")));
            }
            let per_axis = math::ceil(2.0 * l / spacing) as usize;
            let total = per_axis.checked_pow(axes as u32).unwrap_or(usize::MAX);
            if total > 1_000_000 {
                return Err(Error::GridTooLarge(format!("{per_axis} lattice bumps per axis")));
            }
            for k in 0..total {
                let mut c = [0.0; MAX_AXES];
                let mut rest = k;
                for a in (0..axes).rev() {
                    c[a] = -l + (rest % per_axis) as f64 * spacing;
                    rest /= per_axis;
                }
                centers.push(c);
            }
        }
        for c in centers {
            let bump = PhaseField::from_fn(grid, |z| {
                let mut d2 = 0.0;
                for a in 0..axes {
                    // nearest periodic image of the center
                    let mut dz = z[a] - c[a];
                    dz -= 2.0 * l * math::round(dz / (2.0 * l));
                    d2 += dz * dz;
                }
                Complex64::new(math::exp(-d2 / (2.0 * width * width)), 0.0)
            })?;
            record(plan.forward(&bump)?.band_project(n)?)?;
        }
        let ln_worst = math::ln(worst);
        rows.push(SpectralRow {
            n,
            samples: count,
            worst_ratio: worst,
            fitted_c: ln_worst / (1.0 + n),
            norm_form_c: 0.5 * (ln_worst + ln_plancherel) / (1.0 + n),
        });
    }
    let fitted_c_raw = rows.iter().map(|r| r.fitted_c).fold(f64::NEG_INFINITY, f64::max);
    let c1 = rows.iter().map(|r| r.norm_form_c).fold(0.0, f64::max);
    Ok(SpectralTestReport {
        set: set.clone(),
        rows,
        fitted_c: fitted_c_raw.max(0.0),
        fitted_c_raw,
        c1,
        family: options.describe(),
        seed,
    })
}

#[cfg(all(test, feature = "std"))]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;

    fn small_options() -> FitOptions {
        FitOptions { random_samples: 4, random_bumps: 4, lattice_spacing: Some(1.0) }
    }

    #[test]
    fn full_mask_gives_plancherel_factor() {
        let g = PhaseGrid::new(1, 32, PI).unwrap();
        let plan = FourierPlan::new(g);
        let f =
            PhaseField::from_fn(g, |z| Complex64::new((-(z[0] * z[0] + 2.0 * z[1] * z[1])).exp(), z[0].sin())).unwrap();
        let r = spectral_ratio(&plan, &f, &GridMask::full(g, Space::Phase), 3.0).unwrap();
        let expected = (2.0 * PI).powi(-2);
        assert!((r - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn empty_mask_is_signaled() {
        let g = PhaseGrid::new(1, 16, PI).unwrap();
        let plan = FourierPlan::new(g);
        let f = PhaseField::from_fn(g, |z| Complex64::new((-(z[0] * z[0] + z[1] * z[1])).exp(), 0.0)).unwrap();
        let empty = GridMask::new(g, Space::Phase, alloc::vec![false; g.len()]).unwrap();
        assert!(matches!(spectral_ratio(&plan, &f, &empty, 2.0), Err(Error::ZeroRestrictedNorm)));
    }

    #[test]
    fn full_space_fit_is_trivial() {
        let g = PhaseGrid::new(1, 32, PI).unwrap();
        let plan = FourierPlan::new(g);
        let rep =
            fit_spectral_constant(&plan, &ThickSetDescriptor::FullSpace, &[1.0, 2.0], &small_options(), 7).unwrap();
        assert_eq!(rep.fitted_c, 0.0);
        assert!(rep.c1.abs() < 1e-12);
        // ln r < 0, so the largest of ln r/(1+N) sits at the largest N
        assert!((rep.fitted_c_raw - (2.0 * PI).powi(-2).ln() / 3.0).abs() < 1e-9);
    }

    #[test]
    fn fit_is_reproducible_and_monotone() {
        let g = PhaseGrid::new(1, 32, PI).unwrap();
        let plan = FourierPlan::new(g);
        let big = ThickSetDescriptor::lattice_balls(2, 1.0, 0.4);
        let small = ThickSetDescriptor::lattice_balls(2, 1.0, 0.3);
        let a = fit_spectral_constant(&plan, &small, &[1.0, 3.0], &small_options(), 11).unwrap();
        let b = fit_spectral_constant(&plan, &small, &[1.0, 3.0], &small_options(), 11).unwrap();
        assert_eq!(a, b);
        let c = fit_spectral_constant(&plan, &big, &[1.0, 3.0], &small_options(), 11).unwrap();
        assert!(c.fitted_c_raw <= a.fitted_c_raw);
        assert!(c.c1 <= a.c1);
    }
}
