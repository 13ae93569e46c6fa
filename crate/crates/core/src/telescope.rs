//! Observability over measurable time sets by telescoping: a geometric time
//! sequence `l_m = l + λ^{m−1}(l₁ − l)` accumulating at a density point `l`
//! of `E`, and the constant
//! `C_obs = 3e^{C₁ + βC₂/(l₁−l₃)³}` in
//! `‖g(T)‖ ≤ C_obs ∫_E ‖g(t)‖_{L²(ω)} dt`.
//!
//! `C_obs` is astronomically large for moderate data (`ln C_obs ≈ 1.5·10⁴`
//! at `C₁ = 1, T = 1`), so constants and ratios are carried as logarithms.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridMask;
use crate::lab::{covering_grid, restricted_norm_masked, VerifyOptions};
use crate::math;
use crate::mixture::GaussianMixtureState;
use crate::thickness::ThickSetDescriptor;

/// Default ratio of the geometric sequence.
pub const DEFAULT_LAMBDA: f64 = 0.95;

/// Finite union of disjoint open intervals in `(0, T)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeSet {
    horizon: f64,
    intervals: Vec<(f64, f64)>,
}

impl TimeSet {
    /// Intervals are sorted here; they must be nonempty, disjoint and lie in
    /// `[0, T]`.
    pub fn new(horizon: f64, mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::param("T", format!("horizon must be finite and > 0, got {horizon}")));
        }
        if intervals.is_empty() {
            return Err(Error::param("E", "time set is empty"));
        }
        for &(a, b) in &intervals {
            if !(a >= 0.0 && a < b && b <= horizon) {
                return Err(Error::param(
                    "E",
                    format!("interval ({a}, {b}) is not a nonempty subinterval of (0, {horizon})"),
                ));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::param(
                    "E",
                    format!("intervals ({}, {}) and ({}, {}) overlap", w[0].0, w[0].1, w[1].0, w[1].1),
                ));
            }
        }
        Ok(TimeSet { horizon, intervals })
    }

    /// `E = (0, T)`.
    pub fn interval(horizon: f64) -> Result<Self> {
        Self::new(horizon, alloc::vec![(0.0, horizon)])
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// `|E ∩ (a, b)|`.
    pub fn intersection_measure(&self, a: f64, b: f64) -> f64 {
        self.intervals.iter().map(|&(c, d)| (d.min(b) - c.max(a)).max(0.0)).sum()
    }

    /// Pieces of `E ∩ (a, b)`.
    pub fn clip(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .filter_map(|&(c, d)| {
                let (lo, hi) = (c.max(a), d.min(b));
                (lo < hi).then_some((lo, hi))
            })
            .collect()
    }

    /// The component `(a, b)` with `a < t < b`.
    pub fn component_containing(&self, t: f64) -> Option<(f64, f64)> {
        self.intervals.iter().copied().find(|&(a, b)| a < t && t < b)
    }
}

/// A point 1% of the way into the longest component (leftmost on ties);
/// interior points of an interval union all have density one.
pub fn find_density_point(e: &TimeSet) -> Result<f64> {
    let mut best = e.intervals[0];
    for &(a, b) in &e.intervals[1..] {
        if b - a > best.1 - best.0 {
            best = (a, b);
        }
    }
    Ok(best.0 + 0.01 * (best.1 - best.0))
}

/// `l_m = l + λ^{m−1}(l₁ − l)`, `m = 1..=depth`, with the measure condition
/// `3|E ∩ (l_{m+1}, l_m)| ≥ l_m − l_{m+1}` certified for every `m`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TelescopeSequence {
    pub l: f64,
    pub l1: f64,
    pub lambda: f64,
    /// `l_1, …, l_M`.
    pub terms: Vec<f64>,
    /// `|E ∩ (l_{m+1}, l_m)|` for `m = 1..M`.
    pub interval_measures: Vec<f64>,
    /// First `m` with `(l, l_m)` inside the component of `l`; the measure
    /// condition is automatic from there on.
    pub containment_index: usize,
}

impl TelescopeSequence {
    pub fn depth(&self) -> usize {
        self.terms.len()
    }

    /// `l_m` for any `m ≥ 1`.
    pub fn term(&self, m: usize) -> f64 {
        self.l + math::powi(self.lambda, m as i32 - 1) * (self.l1 - self.l)
    }

    /// Largest deviation of `(l_{m+1} − l)/(l_m − l)` from `λ`.
    pub fn geometric_error(&self) -> f64 {
        self.terms.windows(2).map(|w| math::abs((w[1] - self.l) / (w[0] - self.l) - self.lambda)).fold(0.0, f64::max)
    }

    /// Largest `|λ²(l_m − l_{m+2}) − (l_{m+2} − l_{m+4})|`.
    pub fn two_step_error(&self) -> f64 {
        let t = &self.terms;
        (0..t.len().saturating_sub(4))
            .map(|i| math::abs(self.lambda * self.lambda * (t[i] - t[i + 2]) - (t[i + 2] - t[i + 4])))
            .fold(0.0, f64::max)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda < 1.0) || !(math::powi(lambda, 6) > 0.5) {
        return Err(Error::param("lambda", format!("must satisfy 2^(-1/6) < λ < 1, got {lambda}")));
    }
    Ok(())
}

/// Build and certify the sequence. The depth is raised to at least two past
/// the containment index.
pub fn build_sequence(e: &TimeSet, l: f64, lambda: f64, l1: f64, depth: usize) -> Result<TelescopeSequence> {
    check_lambda(lambda)?;
    let (_, end) = e.component_containing(l).ok_or_else(|| Error::param("l", format!("{l} is not interior to E")))?;
    if !(l < l1 && l1 <= e.horizon()) {
        return Err(Error::param("l1", format!("need l < l1 ≤ T, got l = {l}, l1 = {l1}, T = {}", e.horizon())));
    }
    let mut seq =
        TelescopeSequence { l, l1, lambda, terms: Vec::new(), interval_measures: Vec::new(), containment_index: 0 };
    let mut m0 = 1;
    while seq.term(m0) > end {
        m0 += 1;
    }
    seq.containment_index = m0;
    let depth = depth.max(m0 + 2);
    seq.terms = (1..=depth).map(|m| seq.term(m)).collect();
    for m in 1..depth {
        let (hi, lo) = (seq.terms[m - 1], seq.terms[m]);
        let meas = e.intersection_measure(lo, hi);
        if 3.0 * meas < hi - lo {
            return Err(Error::MeasureCondition { m, lhs: 3.0 * meas, rhs: hi - lo });
        }
        seq.interval_measures.push(meas);
    }
    Ok(seq)
}

/// `l₁ = T` when it passes, otherwise bisection between the end of the
/// component of `l` (which always passes) and `T`.
pub fn choose_l1(e: &TimeSet, l: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let (_, end) = e.component_containing(l).ok_or_else(|| Error::param("l", format!("{l} is not interior to E")))?;
    let passes = |l1: f64| build_sequence(e, l, lambda, l1, 0).is_ok();
    if passes(e.horizon()) {
        return Ok(e.horizon());
    }
    let (mut lo, mut hi) = (end, e.horizon());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Density point, `l₁` and certified sequence for `E`.
pub fn sequence_for(e: &TimeSet, lambda: f64) -> Result<TelescopeSequence> {
    let l = find_density_point(e)?;
    let l1 = choose_l1(e, l, lambda)?;
    build_sequence(e, l, lambda, l1, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TelescopeConstants {
    pub c1: f64,
    /// `λ⁶/(2λ⁶ − 1)`.
    pub beta: f64,
    /// `(1 + 1/λ)³ [C₁ + λ³(l₁ − l₂)²]`.
    pub c2: f64,
    /// `ln C_obs = ln 3 + C₁ + βC₂/(l₁ − l₃)³`.
    pub ln_c_obs: f64,
}

impl TelescopeConstants {
    /// `C_obs`, possibly `+∞`.
    pub fn c_obs(&self) -> f64 {
        math::exp(self.ln_c_obs)
    }

    /// `ln ε_m = −(β − 1)C₂/(l_m − l_{m+2})³`.
    pub fn ln_step_epsilon(&self, seq: &TelescopeSequence, m: usize) -> f64 {
        -(self.beta - 1.0) * self.c2 / cube(seq.term(m) - seq.term(m + 2))
    }

    /// `−βC₂/(l_m − l_{m+2})³`, the log-weight of `‖g(l_m)‖` in the series.
    pub fn ln_weight(&self, seq: &TelescopeSequence, m: usize) -> f64 {
        -self.beta * self.c2 / cube(seq.term(m) - seq.term(m + 2))
    }
}

fn beta_of(lambda: f64) -> f64 {
    let l6 = math::powi(lambda, 6);
    l6 / (2.0 * l6 - 1.0)
}

fn constants_from_gaps(c1: f64, lambda: f64, gap12: f64, gap13: f64) -> TelescopeConstants {
    let beta = beta_of(lambda);
    let c2 = cube(1.0 + 1.0 / lambda) * (c1 + cube(lambda) * gap12 * gap12);
    let ln_c_obs = math::ln(3.0) + c1 + beta * c2 / cube(gap13);
    TelescopeConstants { c1, beta, c2, ln_c_obs }
}

pub fn assemble_constants(seq: &TelescopeSequence, c1: f64) -> Result<TelescopeConstants> {
    check_lambda(seq.lambda)?;
    if !(c1 >= 0.0) || !c1.is_finite() {
        return Err(Error::param("C1", format!("must be finite and ≥ 0, got {c1}")));
    }
    Ok(constants_from_gaps(c1, seq.lambda, seq.term(1) - seq.term(2), seq.term(1) - seq.term(3)))
}

/// Links of `3|E∩(l_{m+1},l_m)| ≥ l_m − l_{m+1} ≥ e^{−1/(l_m − l_{m+1})}
/// ≥ e^{−λ³(l₁−l₂)²/(l_{m+1}−l_{m+2})³}`, checked for every built `m`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuxiliaryChain {
    pub checked: usize,
    /// `(m, link)` with link 1, 2 or 3 counted from the left.
    pub violations: Vec<(usize, u8)>,
}

pub fn auxiliary_chain(seq: &TelescopeSequence) -> AuxiliaryChain {
    let lam3 = cube(seq.lambda);
    let gap12 = seq.term(1) - seq.term(2);
    let mut violations = Vec::new();
    for (i, &meas) in seq.interval_measures.iter().enumerate() {
        let m = i + 1;
        let len = seq.term(m) - seq.term(m + 1);
        let next = seq.term(m + 1) - seq.term(m + 2);
        // compare logarithms; e^{−1/len} underflows for short intervals
        let links = [3.0 * meas >= len, math::ln(len) >= -1.0 / len, -1.0 / len >= -lam3 * gap12 * gap12 / cube(next)];
        for (k, ok) in links.iter().enumerate() {
            if !ok {
                violations.push((m, k as u8 + 1));
            }
        }
    }
    AuxiliaryChain { checked: seq.interval_measures.len(), violations }
}

/// Composite Gauss–Legendre rule for time integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeQuadrature {
    /// Panels are at most this long.
    pub panel_width: f64,
    pub order: usize,
    /// Largest tolerated relative gap between the rule and the same panels
    /// at order `order − 2`.
    pub tolerance: f64,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        TimeQuadrature { panel_width: 0.1, order: 6, tolerance: 1e-6 }
    }
}

impl TimeQuadrature {
    fn integrate(&self, pieces: &[(f64, f64)], f: &mut impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        if !(self.panel_width > 0.0) || self.order < 3 {
            return Err(Error::param("quadrature", "need panel_width > 0 and order ≥ 3"));
        }
        let mut fine = 0.0;
        let mut coarse = 0.0;
        for &(a, b) in pieces {
            let panels = (math::ceil((b - a) / self.panel_width) as usize).max(1);
            let (x, w) = math::composite_gauss_legendre(a, b, panels, self.order);
            for (t, wt) in x.iter().zip(&w) {
                fine += wt * f(*t)?;
            }
            let (x, w) = math::composite_gauss_legendre(a, b, panels, self.order - 2);
            for (t, wt) in x.iter().zip(&w) {
                coarse += wt * f(*t)?;
            }
        }
        if math::abs(fine - coarse) > self.tolerance * math::abs(fine) {
            return Err(Error::QuadratureResolution(format!(
                "orders {} and {} disagree: {fine} vs {coarse}",
                self.order,
                self.order - 2
            )));
        }
        Ok(fine)
    }
}

/// One step of the chain `a_m − a_{m+2} ≤ 3e^{C₁} ∫_{E∩(l_{m+1},l_m)} ‖g‖_ω`,
/// `a_m = e^{−βC₂/(l_m−l_{m+2})³} ‖g(l_m)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepAudit {
    pub m: usize,
    pub l_m: f64,
    pub interval_measure: f64,
    /// `ln(a_m − a_{m+2})`, `−∞` when the difference is not positive.
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    /// `ln ε_m` of the proof's choice.
    pub ln_epsilon: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservabilityReport {
    /// `‖g(T)‖`.
    pub lhs: f64,
    /// `∫_E ‖g(t)‖_{L²(ω)} dt`.
    pub integral: f64,
    pub ln_rhs: f64,
    pub ln_ratio: f64,
    /// `lhs / rhs` (underflows to 0 for realistic constants).
    pub ratio: f64,
    pub constants: TelescopeConstants,
    pub steps: Vec<StepAudit>,
    pub chain_violations: usize,
    /// `|Σ_{k≤K} (a_{2k+1} − a_{2k+3}) − (a_1 − a_{2K+3})| / a_1`.
    pub telescoping_error: f64,
    /// `a_{2K+3}/a_1`.
    pub telescoping_remainder: f64,
    pub telescoping_depth: usize,
    /// Pairs of sequence times where the full norm increased.
    pub monotone_violations: usize,
    pub auxiliary: AuxiliaryChain,
}

const REMAINDER_TARGET: f64 = 1e-10;

/// Check `‖g(T)‖ ≤ C_obs ∫_E ‖g(t)‖_{L²(ω)} dt` for one trajectory, with the
/// per-step chain, the telescoping identity and norm monotonicity.
pub fn verify_observability(
    g0: &GaussianMixtureState,
    set: &ThickSetDescriptor,
    e: &TimeSet,
    seq: &TelescopeSequence,
    constants: &TelescopeConstants,
    quadrature: &TimeQuadrature,
    options: &VerifyOptions,
) -> Result<ObservabilityReport> {
    let t_final = e.horizon();
    let mask = if *set == ThickSetDescriptor::FullSpace {
        None
    } else {
        let ends = [g0.clone(), g0.propagate(0.5 * t_final)?, g0.propagate(t_final)?];
        let grid = covering_grid(&ends, options)?;
        Some(GridMask::from_predicate(grid, |z| set.contains(z)))
    };
    let mut omega_norm = |t: f64| -> Result<f64> {
        let gt = g0.propagate(t)?;
        Ok(match &mask {
            Some(mask) => restricted_norm_masked(&gt, mask)?,
            None => gt.physical_norm(),
        })
    };
    let full_norm = |t: f64| -> Result<f64> { Ok(g0.propagate(t)?.physical_norm()) };

    let lhs = full_norm(t_final)?;
    let integral = quadrature.integrate(e.intervals(), &mut omega_norm)?;
    if !(integral > 0.0) {
        return Err(Error::ZeroRestrictedNorm);
    }
    let ln_rhs = constants.ln_c_obs + math::ln(integral);
    let ln_ratio = math::ln(lhs) - ln_rhs;

    let ln_a = |m: usize| -> Result<f64> { Ok(constants.ln_weight(seq, m) + math::ln(full_norm(seq.term(m))?)) };
    let mut steps = Vec::with_capacity(seq.depth());
    for m in 1..seq.depth() {
        let (la, lb) = (ln_a(m)?, ln_a(m + 2)?);
        let ln_lhs = if lb < la { la + math::ln(-math::expm1(lb - la)) } else { f64::NEG_INFINITY };
        let pieces = e.clip(seq.term(m + 1), seq.term(m));
        let piece_integral = if pieces.is_empty() { 0.0 } else { quadrature.integrate(&pieces, &mut omega_norm)? };
        let ln_rhs = math::ln(3.0) + constants.c1 + math::ln(piece_integral);
        steps.push(StepAudit {
            m,
            l_m: seq.term(m),
            interval_measure: seq.interval_measures[m - 1],
            ln_lhs,
            ln_rhs,
            ln_epsilon: constants.ln_step_epsilon(seq, m),
            holds: ln_lhs <= ln_rhs,
        });
    }
    let chain_violations = steps.iter().filter(|s| !s.holds).count();

    // telescoping series over odd indices, scaled by a_1
    let ln_a1 = ln_a(1)?;
    let mut depth = 0;
    while ln_a(2 * depth + 3)? - ln_a1 > math::ln(REMAINDER_TARGET) {
        depth += 1;
        if depth > 100_000 {
            return Err(Error::QuadratureResolution(format!("telescoping remainder above {REMAINDER_TARGET}")));
        }
    }
    let mut sum = 0.0;
    for k in 0..=depth {
        sum += math::exp(ln_a(2 * k + 1)? - ln_a1) - math::exp(ln_a(2 * k + 3)? - ln_a1);
    }
    let remainder = math::exp(ln_a(2 * depth + 3)? - ln_a1);
    let telescoping_error = math::abs(sum - (1.0 - remainder));

    let mut times: Vec<f64> = seq.terms.clone();
    times.push(t_final);
    times.sort_by(f64::total_cmp);
    let norms: Vec<f64> = times.iter().map(|&t| full_norm(t)).collect::<Result<_>>()?;
    let monotone_violations = norms.windows(2).filter(|w| w[1] > w[0] * (1.0 + 1e-12)).count();

    Ok(ObservabilityReport {
        lhs,
        integral,
        ln_rhs,
        ln_ratio,
        ratio: math::exp(ln_ratio),
        constants: *constants,
        steps,
        chain_violations,
        telescoping_error,
        telescoping_remainder: remainder,
        telescoping_depth: depth,
        monotone_violations,
        auxiliary: auxiliary_chain(seq),
    })
}

/// One reading of the `E = (0, T)` specialization.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntervalConstants {
    pub l1_minus_l2: f64,
    pub l1_minus_l3: f64,
    pub constants: TelescopeConstants,
    /// `C` with `C_obs = e^{C(1+1/T³)}` at this `T`.
    pub exhibited_c: f64,
}

/// `C_obs` for `E = (0, T)` with `l₁ = T`, under two readings:
/// `sequence` keeps `l = 0.01T` and `l₃ = l + λ²(l₁ − l)`; `literal` takes
/// `l₁ − l₃ = 3T/4` and `l₁ − l₂ = (1 − λ)T`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CobsInterval {
    pub t: f64,
    pub sequence: IntervalConstants,
    pub literal: IntervalConstants,
}

pub fn cobs_interval(t: f64, c1: f64, lambda: f64) -> Result<CobsInterval> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("T", format!("must be finite and > 0, got {t}")));
    }
    check_lambda(lambda)?;
    if !(c1 >= 0.0) || !c1.is_finite() {
        return Err(Error::param("C1", format!("must be finite and ≥ 0, got {c1}")));
    }
    let shape = 1.0 + 1.0 / cube(t);
    let reading = |gap12: f64, gap13: f64| {
        let constants = constants_from_gaps(c1, lambda, gap12, gap13);
        IntervalConstants { l1_minus_l2: gap12, l1_minus_l3: gap13, constants, exhibited_c: constants.ln_c_obs / shape }
    };
    let l = 0.01 * t;
    Ok(CobsInterval {
        t,
        sequence: reading((1.0 - lambda) * (t - l), (1.0 - lambda * lambda) * (t - l)),
        literal: reading((1.0 - lambda) * t, 0.75 * t),
    })
}

/// Fit of `ln C_obs ≈ A + B/T³` minimizing relative residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AffineFit {
    pub intercept: f64,
    pub slope: f64,
    /// `max_i |fit_i − y_i| / |y_i|`.
    pub max_relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingAudit {
    pub points: Vec<CobsInterval>,
    pub sequence: AffineFit,
    pub literal: AffineFit,
}

/// Regress `ln C_obs` on `1/T³` for both readings of [`cobs_interval`].
pub fn cobs_scaling_audit(ts: &[f64], c1: f64, lambda: f64) -> Result<ScalingAudit> {
    if ts.len() < 3 {
        return Err(Error::param("T", "need at least three horizons for a residual"));
    }
    let points: Vec<CobsInterval> = ts.iter().map(|&t| cobs_interval(t, c1, lambda)).collect::<Result<_>>()?;
    let xs: Vec<f64> = ts.iter().map(|t| 1.0 / cube(*t)).collect();
    let fit = |ys: Vec<f64>| {
        let ws: Vec<f64> = ys.iter().map(|y| 1.0 / (y * y)).collect();
        let (intercept, slope) = math::weighted_linear_fit(&xs, &ys, &ws);
        let max_relative_residual =
            xs.iter().zip(&ys).map(|(x, y)| math::abs(intercept + slope * x - y) / math::abs(*y)).fold(0.0, f64::max);
        AffineFit { intercept, slope, max_relative_residual }
    };
    Ok(ScalingAudit {
        sequence: fit(points.iter().map(|p| p.sequence.constants.ln_c_obs).collect()),
        literal: fit(points.iter().map(|p| p.literal.constants.ln_c_obs).collect()),
        points,
    })
}

fn cube(x: f64) -> f64 {
    x * x * x
}
