//! Closed-form Gaussian-mixture representation of a spectral solution
//! `ĝ(ζ) = Σ_k c_k exp(−½(ζ−m_k)ᵀ M_k (ζ−m_k) + i b_k·ζ)`, `ζ = (ξ, η)`.
//!
//! Everything the exact backend needs is closed form: norms (pairwise complex
//! Gaussian integrals), pointwise evaluation in both spaces, and propagation
//! (pullback under the shear `(ξ, η) ↦ (ξ, η + tξ)` plus a quadratic damping).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{PhaseField, PhaseGrid, SpectralField, MAX_AXES};
use crate::linalg::{self, CMatrix, ComplexLdl};
use crate::math;

/// One term `c · exp(−½(ζ−m)ᵀM(ζ−m) + i b·ζ)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianTerm {
    pub amplitude: Complex64,
    pub center: Vec<f64>,
    pub quadratic: CMatrix,
    pub phase: Vec<f64>,
}

impl GaussianTerm {
    /// Spectral image of the phase-space Gaussian
    /// `a · exp(−½(z−z₀)ᵀP(z−z₀) + i k₀·z)` with real SPD precision `P`.
    pub fn from_phase_gaussian(amplitude: Complex64, z0: &[f64], precision: &[f64], k0: &[f64]) -> Result<Self> {
        let n = z0.len();
        if precision.len() != n * n || k0.len() != n {
            return Err(Error::param("precision", "dimension mismatch"));
        }
        let chol = linalg::cholesky(precision, n).ok_or(Error::NotPositiveDefinite { term: 0 })?;
        let det_sqrt: f64 = (0..n).map(|i| chol[i * n + i]).product();
        let cov = linalg::invert_real(precision, n).ok_or(Error::NotPositiveDefinite { term: 0 })?;
        let phase0: f64 = z0.iter().zip(k0).map(|(a, b)| a * b).sum();
        let scale = math::powf(2.0 * PI, n as f64 / 2.0) / det_sqrt;
        let mut quadratic = CMatrix::from_real(n, &cov);
        quadratic.symmetrize();
        Ok(GaussianTerm {
            amplitude: amplitude * math::cis(phase0) * scale,
            center: k0.to_vec(),
            quadratic,
            phase: z0.iter().map(|z| -z).collect(),
        })
    }

    /// Isotropic phase-space Gaussian `a · exp(−|z−z₀|²/(2s²))`.
    pub fn isotropic(amplitude: Complex64, z0: &[f64], width: f64) -> Result<Self> {
        let n = z0.len();
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = 1.0 / (width * width);
        }
        Self::from_phase_gaussian(amplitude, z0, &p, &vec![0.0; n])
    }

    fn dim(&self) -> usize {
        self.center.len()
    }

    /// Canonical form of `c · exp(−½ζᵀAζ + vᵀζ + κ)` with `Re A` positive
    /// definite: real center `m = (Re A)⁻¹ Re v`, real phase
    /// `b = Im v − (Im A) m`, amplitude `c·e^{κ + ½mᵀAm}`.
    fn from_general(amplitude: Complex64, a: CMatrix, v: &[Complex64], kappa: Complex64) -> Option<Self> {
        let n = a.n;
        let re = a.real_part();
        let im = a.imag_part();
        let re_v: Vec<f64> = v.iter().map(|z| z.re).collect();
        let re_inv = linalg::invert_real(&re, n)?;
        let m: Vec<f64> = (0..n).map(|i| (0..n).map(|j| re_inv[i * n + j] * re_v[j]).sum()).collect();
        let b: Vec<f64> = (0..n).map(|i| v[i].im - (0..n).map(|j| im[i * n + j] * m[j]).sum::<f64>()).collect();
        let c = amplitude * math::cexp(kappa + a.quad_real(&m) * 0.5);
        Some(GaussianTerm { amplitude: c, center: m, quadratic: a, phase: b })
    }

    /// `(A, v, κ)` of the general form `exp(−½ζᵀAζ + vᵀζ + κ)` (amplitude aside).
    fn general_form(&self) -> (CMatrix, Vec<Complex64>, Complex64) {
        let mm = self.quadratic.mul_real_vec(&self.center);
        let v: Vec<Complex64> = mm.iter().zip(&self.phase).map(|(a, b)| a + Complex64::new(0.0, *b)).collect();
        let kappa = -self.quadratic.quad_real(&self.center) * 0.5;
        (self.quadratic.clone(), v, kappa)
    }

    #[inline]
    fn exponent_at(&self, zeta: &[f64]) -> Complex64 {
        let n = self.dim();
        let mut buf = [0.0; MAX_MIXTURE_AXES];
        let diff = &mut buf[..n];
        for i in 0..n {
            diff[i] = zeta[i] - self.center[i];
        }
        let q = self.quadratic.quad_real(diff);
        let lin: f64 = self.phase.iter().zip(zeta).map(|(b, z)| b * z).sum();
        -q * 0.5 + Complex64::new(0.0, lin)
    }
}

/// Sum of [`GaussianTerm`]s in `2d` frequency variables.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianMixtureState {
    d: usize,
    terms: Vec<GaussianTerm>,
}

/// Largest phase-space dimension accepted by the mixture backend (`d ≤ 4`).
pub const MAX_MIXTURE_AXES: usize = 8;

/// Per-term data for repeated evaluation in physical space.
struct PhysicalTerm {
    prefactor: Complex64,
    inverse: CMatrix,
    center: Vec<f64>,
    phase: Vec<f64>,
}

impl GaussianMixtureState {
    pub fn new(d: usize, terms: Vec<GaussianTerm>) -> Result<Self> {
        if d == 0 || 2 * d > MAX_MIXTURE_AXES {
            return Err(Error::Unsupported(format!("mixture backend supports 1 ≤ d ≤ 4, got {d}")));
        }
        let n = 2 * d;
        for (k, t) in terms.iter().enumerate() {
            if t.center.len() != n || t.phase.len() != n || t.quadratic.n != n || t.quadratic.data.len() != n * n {
                return Err(Error::param("terms", format!("term {k} has wrong dimensions for d = {d}")));
            }
            let finite = t.amplitude.re.is_finite()
                && t.amplitude.im.is_finite()
                && t.center.iter().chain(&t.phase).all(|x| x.is_finite())
                && t.quadratic.data.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite {
                return Err(Error::NonFinite { index: k });
            }
            let scale = t.quadratic.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if t.quadratic.asymmetry() > 1e-12 * scale.max(1.0) {
                return Err(Error::param("quadratic", format!("term {k} is not symmetric")));
            }
            if !linalg::is_positive_definite(&t.quadratic.real_part(), n) {
                return Err(Error::NotPositiveDefinite { term: k });
            }
        }
        Ok(GaussianMixtureState { d, terms })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn axes(&self) -> usize {
        2 * self.d
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    /// Smallest eigenvalue of `Re M` over all terms.
    pub fn min_real_eigenvalue(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| linalg::min_eigenvalue(&t.quadratic.real_part(), self.axes()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `ĝ(ζ)`.
    pub fn eval(&self, zeta: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.amplitude * math::cexp(t.exponent_at(zeta))).sum()
    }

    /// `∫ conj(F_i) F_j dζ`.
    pub fn pair_integral(&self, i: usize, j: usize) -> Complex64 {
        let (ti, tj) = (&self.terms[i], &self.terms[j]);
        let (ai, vi, ki) = ti.general_form();
        let (aj, vj, kj) = tj.general_form();
        let a = ai.conj().add(&aj);
        let v: Vec<Complex64> = vi.iter().zip(&vj).map(|(x, y)| x.conj() + y).collect();
        let kappa = ki.conj() + kj;
        let ldl = ComplexLdl::new(&a).expect("sum of accretive forms is accretive");
        let sol = ldl.solve(&v);
        let half_vav: Complex64 = v.iter().zip(&sol).map(|(x, y)| x * y).sum::<Complex64>() * 0.5;
        let n = self.axes() as f64;
        let log_val = half_vav + kappa - ldl.log_sqrt_det() + Complex64::new(0.5 * n * math::ln(2.0 * PI), 0.0);
        ti.amplitude.conj() * tj.amplitude * math::cexp(log_val)
    }

    /// `‖ĝ‖²_{L²(ℝ^{2d})}` in closed form.
    pub fn spectral_mass(&self) -> f64 {
        let k = self.terms.len();
        let mut total = 0.0;
        for i in 0..k {
            total += self.pair_integral(i, i).re;
            for j in (i + 1)..k {
                total += 2.0 * self.pair_integral(i, j).re;
            }
        }
        total.max(0.0)
    }

    /// `‖ĝ‖_{L²(ℝ^{2d})}` in closed form.
    pub fn norm(&self) -> f64 {
        math::sqrt(self.spectral_mass())
    }

    /// `‖g‖_{L²(ℝ^{2d})} = ‖ĝ‖ / (2π)^d`.
    pub fn physical_norm(&self) -> f64 {
        self.norm() / math::powi(2.0 * PI, self.d as i32)
    }

    fn physical_terms(&self) -> Vec<PhysicalTerm> {
        let n = self.axes();
        self.terms
            .iter()
            .map(|t| {
                let ldl = ComplexLdl::new(&t.quadratic).expect("validated on construction");
                let inverse = linalg::invert_complex(&t.quadratic).expect("validated on construction");
                let log_pref = Complex64::new(-0.5 * n as f64 * math::ln(2.0 * PI), 0.0) - ldl.log_sqrt_det();
                PhysicalTerm {
                    prefactor: t.amplitude * math::cexp(log_pref),
                    inverse,
                    center: t.center.clone(),
                    phase: t.phase.clone(),
                }
            })
            .collect()
    }

    /// `g(z) = (2π)^{−2d} ∫ ĝ(ζ) e^{iz·ζ} dζ`, in closed form.
    pub fn eval_physical(&self, z: &[f64]) -> Complex64 {
        eval_physical_terms(&self.physical_terms(), z)
    }

    /// Sample `ĝ` on the dual grid.
    pub fn to_spectral_field(&self, grid: &PhaseGrid) -> Result<SpectralField> {
        self.check_grid(grid)?;
        SpectralField::from_fn(*grid, |zeta| self.eval(zeta))
    }

    /// Sample `g` on the physical grid (closed form, no FFT).
    pub fn to_phase_field(&self, grid: &PhaseGrid) -> Result<PhaseField> {
        self.check_grid(grid)?;
        let prepared = self.physical_terms();
        PhaseField::from_fn(*grid, |z| eval_physical_terms(&prepared, z))
    }

    /// `Σ |g(z)|²` over the nodes `z` (flat index `idx`) of `grid` where
    /// `inside(idx, z)` holds.
    pub fn physical_sq_sum(&self, grid: &PhaseGrid, mut inside: impl FnMut(usize, &[f64]) -> bool) -> Result<f64> {
        self.check_grid(grid)?;
        let prepared = self.physical_terms();
        let n = grid.axes();
        let mut z = [0.0; MAX_AXES];
        let mut sum = 0.0;
        for idx in 0..grid.len() {
            grid.node(idx, &mut z);
            if inside(idx, &z[..n]) {
                sum += eval_physical_terms(&prepared, &z[..n]).norm_sqr();
            }
        }
        Ok(sum)
    }

    fn check_grid(&self, grid: &PhaseGrid) -> Result<()> {
        if grid.d() != self.d {
            return Err(Error::GridMismatch(format!("mixture has d = {}, grid has d = {}", self.d, grid.d())));
        }
        Ok(())
    }

    /// Exact solution at time `t`:
    /// `ĝ(t, ξ, η) = ĝ₀(ξ, η + ξt) · exp(−|η|²t − η·ξt² − |ξ|²t³/3)`.
    pub fn propagate(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("t", format!("time must be finite and ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let n = self.axes();
        let d = self.d;
        let mut shear = CMatrix::identity(n);
        let mut damping = CMatrix::zeros(n);
        for a in 0..d {
            shear.set(d + a, a, Complex64::new(t, 0.0));
            // 2·Q_t with Q_t = [[t³/3, t²/2], [t²/2, t]] ⊗ I_d
            damping.set(a, a, Complex64::new(2.0 * t * t * t / 3.0, 0.0));
            damping.set(a, d + a, Complex64::new(t * t, 0.0));
            damping.set(d + a, a, Complex64::new(t * t, 0.0));
            damping.set(d + a, d + a, Complex64::new(2.0 * t, 0.0));
        }
        let shear_t = shear.transpose();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, term) in self.terms.iter().enumerate() {
            let (a, v, kappa) = term.general_form();
            let mut pulled = shear_t.matmul(&a).matmul(&shear).add(&damping);
            pulled.symmetrize();
            let v_new = shear_t.mul_vec(&v);
            let new_term = GaussianTerm::from_general(term.amplitude, pulled, &v_new, kappa)
                .ok_or(Error::NotPositiveDefinite { term: k })?;
            terms.push(new_term);
        }
        let out = GaussianMixtureState { d, terms };
        debug_assert!(out.terms.iter().all(|t| linalg::is_positive_definite(&t.quadratic.real_part(), n)));
        Ok(out)
    }

    /// Upper bounds on the fractions of `‖g‖²` outside the physical box and of
    /// `‖ĝ‖²` outside the dual box of `grid`, from per-term Gaussian tails.
    pub fn truncation_bounds(&self, grid: &PhaseGrid) -> (f64, f64) {
        let l = grid.half_width();
        let ny = grid.nyquist();
        let total = self.spectral_mass();
        if total == 0.0 {
            return (0.0, 0.0);
        }
        let k = self.terms.len() as f64;
        let mut phys = 0.0;
        let mut spec = 0.0;
        for (i, t) in self.terms.iter().enumerate() {
            let mass = self.pair_integral(i, i).re;
            let ext = term_extents(t, self.axes());
            phys += mass * ext.outside_physical(l);
            spec += mass * ext.outside_spectral(ny);
        }
        // |Σ f_i|² ≤ K Σ |f_i|²
        (k * phys / total, k * spec / total)
    }

    /// Smallest grid (of the requested spacing or finer) whose box and
    /// Nyquist band both hold all but `tolerance` of the energy.
    pub fn fitted_grid(&self, max_spacing: f64, tolerance: f64, max_points: usize) -> Result<PhaseGrid> {
        let n = self.axes();
        let kappa = tail_multiplier(tolerance / (n as f64 * self.terms.len().max(1) as f64 * 4.0));
        let mut half_width: f64 = 1.0;
        let mut band: f64 = 1.0;
        for t in &self.terms {
            let ext = term_extents(t, n);
            for a in 0..n {
                half_width = half_width.max(math::abs(ext.phys_center[a]) + kappa * ext.phys_sigma[a]);
                band = band.max(math::abs(ext.spec_center[a]) + kappa * ext.spec_sigma[a]);
            }
        }
        let spacing = max_spacing.min(PI / band);
        let mut points = math::ceil(2.0 * half_width / spacing) as usize;
        points = next_smooth_even(points.max(8));
        if points > max_points {
            return Err(Error::GridTooLarge(format!(
                "need {points} points per axis (box half-width {half_width:.3}, spacing {spacing:.4}); cap is {max_points}"
            )));
        }
        PhaseGrid::new(self.d, points, half_width)
    }

    /// Random phase-space Gaussian data for property tests and experiments:
    /// centers in `[−1, 1]^{2d}`, widths in `[0.6, 1.2]`, an `x_a`–`v_a`
    /// correlation in `[−0.3, 0.3]`, a wave vector in `[−1, 1]^{2d}`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, n_terms: usize) -> Result<Self> {
        let n = 2 * d;
        let mut terms = Vec::with_capacity(n_terms);
        for _ in 0..n_terms {
            let z0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let k0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let widths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.6..1.2)).collect();
            let mut cov = vec![0.0; n * n];
            for a in 0..n {
                cov[a * n + a] = widths[a] * widths[a];
            }
            for a in 0..d {
                let rho: f64 = rng.gen_range(-0.3..0.3);
                let c = rho * widths[a] * widths[d + a];
                cov[a * n + d + a] = c;
                cov[(d + a) * n + a] = c;
            }
            let precision = linalg::invert_real(&cov, n).expect("correlation below one keeps covariance SPD");
            let amp = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI));
            terms.push(GaussianTerm::from_phase_gaussian(amp, &z0, &precision, &k0)?);
        }
        Self::new(d, terms)
    }

    /// [`random`](Self::random) drawn from ChaCha8 stream `stream` of `seed`.
    pub fn seeded(seed: u64, stream: u64, d: usize, n_terms: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self::random(&mut rng, d, n_terms)
    }

    /// `∫_{|ζ|≤N} |ĝ|²` and `∫_{|ζ|>N} |ĝ|²` by radial Gauss–Legendre and
    /// spherical product quadrature of the closed form.
    pub fn band_and_tail_mass(&self, radius: f64) -> Result<(f64, f64)> {
        if !(radius >= 0.0) {
            return Err(Error::param("N", format!("band radius must be ≥ 0, got {radius}")));
        }
        let total = self.spectral_mass();
        let n = self.axes();
        let mut r_max: f64 = 0.0;
        let mut lam_max: f64 = 0.0;
        let mut lam_min = f64::INFINITY;
        let mut phase_spread: f64 = 0.0;
        for t in &self.terms {
            let ev = linalg::symmetric_eigenvalues(&t.quadratic.real_part(), n);
            let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ev.iter().cloned().fold(0.0, f64::max);
            let imag_scale = t.quadratic.imag_part().iter().map(|x| math::abs(*x)).fold(0.0, f64::max);
            lam_min = lam_min.min(lo);
            lam_max = lam_max.max(hi + imag_scale);
            let cnorm = math::sqrt(t.center.iter().map(|c| c * c).sum());
            r_max = r_max.max(cnorm + math::sqrt(2.0 * 50.0 / lo));
            let bnorm = math::sqrt(t.phase.iter().map(|c| c * c).sum());
            phase_spread = phase_spread.max(bnorm);
        }
        if self.terms.is_empty() || radius >= r_max {
            return Ok((total, 0.0));
        }
        let tail = self.shell_mass(radius, r_max, lam_max, lam_min, 2.0 * phase_spread);
        Ok(((total - tail).max(0.0), tail))
    }

    /// `∫_{r0<|ζ|<r1} |ĝ|²`.
    fn shell_mass(&self, r0: f64, r1: f64, lam_max: f64, lam_min: f64, phase_spread: f64) -> f64 {
        let n = self.axes();
        let radial_scale = 0.5 / math::sqrt(lam_max.max(lam_min));
        let panels = (math::ceil((r1 - r0) / radial_scale) as usize).clamp(4, 4000);
        let (rs, rw) = math::composite_gauss_legendre(r0, r1, panels, 10);
        // angular resolution: Gaussian width ~ 1/(r√λ), oscillation ~ |Δb| r
        let angular = r1 * (math::sqrt(lam_max) + phase_spread) + 8.0;
        let n_last = (math::ceil(6.0 * angular) as usize).clamp(64, 8192);
        let n_polar = if n > 2 { (math::ceil(2.0 * angular) as usize).clamp(16, 96) } else { 1 };
        let (gx, gw) = math::gauss_legendre(n_polar);
        let polar: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(x, w)| (0.5 * PI * (x + 1.0), 0.5 * PI * w)).collect();
        let mut total = 0.0;
        let mut dir = [0.0; MAX_MIXTURE_AXES];
        let mut point = [0.0; MAX_MIXTURE_AXES];
        let n_angles = n - 1;
        let n_polar_angles = n_angles - 1;
        let combos = polar.len().pow(n_polar_angles as u32);
        for (r, w) in rs.iter().zip(&rw) {
            let radial_weight = w * math::powi(*r, (n - 1) as i32);
            let mut shell = 0.0;
            for combo in 0..combos {
                // polar angles φ_1..φ_{n−2} ∈ [0, π] with Jacobian Π sin^{n−1−k} φ_k
                let mut c = combo;
                let mut jac = 1.0;
                let mut sin_prod = 1.0;
                for k in 0..n_polar_angles {
                    let (phi, wphi) = polar[c % polar.len()];
                    c /= polar.len();
                    let (s, co) = (math::sin(phi), math::cos(phi));
                    dir[k] = sin_prod * co;
                    jac *= wphi * math::powi(s, (n - 2 - k) as i32);
                    sin_prod *= s;
                }
                for j in 0..n_last {
                    let theta = 2.0 * PI * j as f64 / n_last as f64;
                    dir[n - 2] = sin_prod * math::cos(theta);
                    dir[n - 1] = sin_prod * math::sin(theta);
                    for a in 0..n {
                        point[a] = r * dir[a];
                    }
                    shell += jac * self.eval(&point[..n]).norm_sqr();
                }
            }
            total += radial_weight * shell * 2.0 * PI / n_last as f64;
        }
        total
    }
}

fn eval_physical_terms(terms: &[PhysicalTerm], z: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = [0.0; MAX_MIXTURE_AXES];
    for t in terms {
        let n = t.center.len();
        for a in 0..n {
            w[a] = z[a] + t.phase[a];
        }
        let q = t.inverse.quad_real(&w[..n]);
        let wm: f64 = (0..n).map(|a| w[a] * t.center[a]).sum();
        acc += t.prefactor * math::cexp(-q * 0.5 + Complex64::new(0.0, wm));
    }
    acc
}

struct TermExtents {
    phys_center: Vec<f64>,
    phys_sigma: Vec<f64>,
    spec_center: Vec<f64>,
    spec_sigma: Vec<f64>,
}

impl TermExtents {
    fn outside_physical(&self, half_width: f64) -> f64 {
        outside_box(&self.phys_center, &self.phys_sigma, half_width)
    }

    fn outside_spectral(&self, nyquist: f64) -> f64 {
        outside_box(&self.spec_center, &self.spec_sigma, nyquist)
    }
}

/// Gaussian-density mass outside `[−L, L]^n` (union bound over axes).
fn outside_box(center: &[f64], sigma: &[f64], half: f64) -> f64 {
    center
        .iter()
        .zip(sigma)
        .map(|(c, s)| {
            let hi = (half - c) / (s * core::f64::consts::SQRT_2);
            let lo = (half + c) / (s * core::f64::consts::SQRT_2);
            0.5 * (libm::erfc(hi) + libm::erfc(lo))
        })
        .sum()
}

/// Marginal centers and standard deviations of `|g|²` and `|ĝ|²` for one term,
/// viewed as Gaussian densities.
fn term_extents(t: &GaussianTerm, n: usize) -> TermExtents {
    // |ĝ|² ∝ exp(−(ζ−m)ᵀ Re M (ζ−m)) → covariance (2 Re M)⁻¹
    let re = t.quadratic.real_part();
    let spec_cov = linalg::invert_real(&re, n).expect("validated on construction");
    // |g|² ∝ exp(−(z+b)ᵀ Re(M⁻¹) (z+b)) → covariance (2 Re M⁻¹)⁻¹
    let inv = linalg::invert_complex(&t.quadratic).expect("validated on construction");
    let phys_cov = linalg::invert_real(&inv.real_part(), n).expect("Re M⁻¹ is positive definite");
    TermExtents {
        phys_center: t.phase.iter().map(|b| -b).collect(),
        phys_sigma: (0..n).map(|a| math::sqrt(0.5 * phys_cov[a * n + a])).collect(),
        spec_center: t.center.clone(),
        spec_sigma: (0..n).map(|a| math::sqrt(0.5 * spec_cov[a * n + a])).collect(),
    }
}

/// Smallest `κ` with `erfc(κ/√2) ≤ p`.
fn tail_multiplier(p: f64) -> f64 {
    let mut k: f64 = 1.0;
    while libm::erfc(k / core::f64::consts::SQRT_2) > p && k < 40.0 {
        k += 0.05;
    }
    k
}

/// Smallest even integer `≥ n` whose only prime factors are 2, 3 and 5.
pub fn next_smooth_even(n: usize) -> usize {
    let mut m = n.max(2);
    loop {
        if m % 2 == 0 {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r == 1 {
                return m;
            }
        }
        m += 1;
    }
}
