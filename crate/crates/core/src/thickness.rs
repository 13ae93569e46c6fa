//! Thick (observability) open sets of phase space: descriptors, sampled
//! `(δ, r)` verdicts and grid indicators.
//!
//! A set `O ⊂ ℝⁿ` is `(δ, r)`-thick when every `y` has some `y′` with
//! `B(y′, r) ⊂ O` and `|y − y′| ≤ δ`. The centers `y′` allowed for a given `r`
//! form the admissible region; the smallest `δ` is the largest distance from
//! a point to that region.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridMask, PhaseGrid};
use crate::math;

/// Largest number of sample points a single sweep will visit.
pub const MAX_SAMPLES: usize = 50_000_000;

/// Axis-aligned open box `∏ (lo_a, hi_a)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Candidate observability set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum ThickSetDescriptor {
    FullSpace,
    /// `{z : normal·z > offset}`.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// Union of open balls of radius `radius` around `centers + period·ℤⁿ`.
    PeriodicBalls {
        period: Vec<f64>,
        centers: Vec<Vec<f64>>,
        radius: f64,
    },
    /// Periodic pixel set. Node `j` of the cell grid sits at `j·period/points`
    /// and owns the half-open pixel of width `period/points` centered on it;
    /// `bits` is row-major with axis 0 slowest.
    PeriodicMask {
        period: Vec<f64>,
        points: Vec<usize>,
        bits: Vec<bool>,
    },
    /// Union of open boxes, optionally extended by `period·ℤⁿ`.
    UnionBoxes {
        boxes: Vec<AxisBox>,
        period: Option<Vec<f64>>,
    },
}

/// Nearest admissible center found for the worst sampled point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counterexample {
    pub y: Vec<f64>,
    pub nearest: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThicknessVerdict {
    /// Thick at the sampled resolution.
    pub thick: bool,
    pub delta: f64,
    pub r: f64,
    /// Set whenever `thick` is false; its distance exceeds `delta`.
    pub counterexample: Option<Counterexample>,
    pub sampling_step: f64,
}

impl ThickSetDescriptor {
    /// `ℤⁿ`-type lattice of balls with one center per cell at the origin.
    pub fn lattice_balls(n: usize, period: f64, radius: f64) -> Self {
        ThickSetDescriptor::PeriodicBalls { period: vec![period; n], centers: vec![vec![0.0; n]], radius }
    }

    /// Ambient dimension, or `None` for `FullSpace`.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            ThickSetDescriptor::FullSpace => None,
            ThickSetDescriptor::HalfSpace { normal, .. } => Some(normal.len()),
            ThickSetDescriptor::PeriodicBalls { period, .. } | ThickSetDescriptor::PeriodicMask { period, .. } => {
                Some(period.len())
            }
            ThickSetDescriptor::UnionBoxes { boxes, period } => {
                period.as_ref().map(|p| p.len()).or_else(|| boxes.first().map(|b| b.lo.len()))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ThickSetDescriptor::FullSpace => Ok(()),
            ThickSetDescriptor::HalfSpace { normal, offset } => {
                let len = math::sqrt(normal.iter().map(|c| c * c).sum());
                if normal.is_empty() || !(len > 0.0) || !len.is_finite() || !offset.is_finite() {
                    return Err(Error::param("normal", "half-space needs a finite nonzero normal and finite offset"));
                }
                Ok(())
            }
            ThickSetDescriptor::PeriodicBalls { period, centers, radius } => {
                check_period(period)?;
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::param("radius", format!("must be finite and > 0, got {radius}")));
                }
                if centers.is_empty() {
                    return Err(Error::param("centers", "at least one center is required"));
                }
                for c in centers {
                    if c.len() != period.len() || c.iter().any(|v| !v.is_finite()) {
                        return Err(Error::param("centers", "each center needs one finite coordinate per axis"));
                    }
                }
                Ok(())
            }
            ThickSetDescriptor::PeriodicMask { period, points, bits } => {
                check_period(period)?;
                if points.len() != period.len() || points.contains(&0) {
                    return Err(Error::param("points", "one positive count per axis is required"));
                }
                let total: usize = points.iter().product();
                if bits.len() != total {
                    return Err(Error::param("bits", format!("expected {total} entries, got {}", bits.len())));
                }
                Ok(())
            }
            ThickSetDescriptor::UnionBoxes { boxes, period } => {
                if boxes.is_empty() {
                    return Err(Error::param("boxes", "at least one box is required"));
                }
                let n = boxes[0].lo.len();
                if n == 0 {
                    return Err(Error::param("boxes", "boxes need at least one axis"));
                }
                if let Some(p) = period {
                    check_period(p)?;
                    if p.len() != n {
                        return Err(Error::param("period", "period and boxes disagree on dimension"));
                    }
                }
                for b in boxes {
                    if b.lo.len() != n || b.hi.len() != n {
                        return Err(Error::param("boxes", "all boxes need the same dimension"));
                    }
                    for a in 0..n {
                        if !b.lo[a].is_finite() || !b.hi[a].is_finite() || !(b.lo[a] < b.hi[a]) {
                            return Err(Error::param("boxes", format!("axis {a} needs finite lo < hi")));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Indicator of the open set at `z`.
    pub fn contains(&self, z: &[f64]) -> bool {
        match self {
            ThickSetDescriptor::FullSpace => true,
            ThickSetDescriptor::HalfSpace { normal, offset } => {
                normal.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() > *offset
            }
            ThickSetDescriptor::PeriodicBalls { period, centers, radius } => {
                let y = reduce_fixed(z, period);
                centers.iter().any(|c| {
                    let c = reduce_fixed(c, period);
                    images(period).any(|shift| {
                        let d2: f64 = (0..z.len().min(period.len())).map(|a| sq(y[a] - c[a] - shift[a])).sum();
                        d2 < radius * radius
                    })
                })
            }
            ThickSetDescriptor::PeriodicMask { period, points, bits } => bits[mask_index(z, period, points)],
            ThickSetDescriptor::UnionBoxes { boxes, period } => match period {
                None => boxes.iter().any(|b| (0..z.len()).all(|a| b.lo[a] < z[a] && z[a] < b.hi[a])),
                Some(p) => {
                    let y = reduce(z, p);
                    boxes.iter().any(|b| {
                        let (lo, hi) = reduce_box(b, p);
                        images(p).any(|s| (0..y.len()).all(|a| lo[a] + s[a] < y[a] && y[a] < hi[a] + s[a]))
                    })
                }
            },
        }
    }

    /// Dilate by `s > 0` about the origin.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::param("s", format!("dilation must be finite and > 0, got {s}")));
        }
        let scale = |v: &Vec<f64>| v.iter().map(|c| c * s).collect::<Vec<_>>();
        Ok(match self {
            ThickSetDescriptor::FullSpace => ThickSetDescriptor::FullSpace,
            ThickSetDescriptor::HalfSpace { normal, offset } => {
                ThickSetDescriptor::HalfSpace { normal: normal.clone(), offset: offset * s }
            }
            ThickSetDescriptor::PeriodicBalls { period, centers, radius } => ThickSetDescriptor::PeriodicBalls {
                period: scale(period),
                centers: centers.iter().map(scale).collect(),
                radius: radius * s,
            },
            ThickSetDescriptor::PeriodicMask { period, points, bits } => {
                ThickSetDescriptor::PeriodicMask { period: scale(period), points: points.clone(), bits: bits.clone() }
            }
            ThickSetDescriptor::UnionBoxes { boxes, period } => ThickSetDescriptor::UnionBoxes {
                boxes: boxes.iter().map(|b| AxisBox { lo: scale(&b.lo), hi: scale(&b.hi) }).collect(),
                period: period.as_ref().map(scale),
            },
        })
    }
}

/// Decide `(δ, r)`-thickness at the given sampling resolution.
pub fn check_thickness(set: &ThickSetDescriptor, delta: f64, r: f64, sampling_step: f64) -> Result<ThicknessVerdict> {
    check_positive("delta", delta)?;
    let worst = sweep(set, r, sampling_step, Some(delta))?;
    let thick = worst.as_ref().map_or(true, |w| w.distance <= delta);
    Ok(ThicknessVerdict { thick, delta, r, counterexample: if thick { None } else { worst }, sampling_step })
}

/// Largest sampled distance to the admissible region for inner radius `r`.
/// `f64::INFINITY` for a half-space.
pub fn minimal_delta(set: &ThickSetDescriptor, r: f64, sampling_step: f64) -> Result<f64> {
    Ok(sweep(set, r, sampling_step, None)?.map_or(0.0, |w| w.distance))
}

/// Indicator of the set on the nodes of `grid`.
///
/// Periodic masks must be commensurate with the grid: the grid spacing and
/// the box corner have to be whole multiples of the mask pixel width.
pub fn grid_mask(set: &ThickSetDescriptor, grid: &PhaseGrid) -> Result<GridMask> {
    set.validate()?;
    if let Some(n) = set.dimension() {
        if n != grid.axes() {
            return Err(Error::GridMismatch(format!("set has {n} axes, grid has {}", grid.axes())));
        }
    }
    if let ThickSetDescriptor::PeriodicMask { period, points, .. } = set {
        for a in 0..period.len() {
            let cell = period[a] / points[a] as f64;
            for (what, v) in [("spacing", grid.spacing()), ("corner", grid.half_width())] {
                let q = v / cell;
                if math::abs(q - math::round(q)) > 1e-9 * q.max(1.0) {
                    return Err(Error::GridMismatch(format!(
                        "grid {what} {v} is not a multiple of the mask pixel {cell} on axis {a}"
                    )));
                }
            }
        }
    }
    Ok(GridMask::from_predicate(*grid, |z| set.contains(z)))
}

fn sweep(set: &ThickSetDescriptor, r: f64, step: f64, delta: Option<f64>) -> Result<Option<Counterexample>> {
    check_positive("r", r)?;
    check_positive("sampling_step", step)?;
    set.validate()?;
    match set {
        ThickSetDescriptor::FullSpace => Ok(None),
        ThickSetDescriptor::HalfSpace { normal, offset } => {
            // every depth is reached, so any requested δ is beaten by a point
            // ten times deeper
            let len = math::sqrt(normal.iter().map(|c| c * c).sum());
            let unit: Vec<f64> = normal.iter().map(|c| c / len).collect();
            let base = offset / len;
            if delta.is_none() {
                return Ok(Some(Counterexample {
                    y: unit.iter().map(|_| f64::NEG_INFINITY).collect(),
                    nearest: unit.iter().map(|_| f64::NAN).collect(),
                    distance: f64::INFINITY,
                }));
            }
            let depth = 10.0 * delta.unwrap_or(1.0).max(1.0);
            let y: Vec<f64> = unit.iter().map(|u| u * (base - depth)).collect();
            let nearest: Vec<f64> = unit.iter().map(|u| u * (base + r)).collect();
            Ok(Some(Counterexample { y, nearest, distance: depth + r }))
        }
        ThickSetDescriptor::UnionBoxes { period: None, .. } => Err(Error::Unsupported(String::from(
            "thickness of a non-periodic union of boxes cannot be decided on a bounded sample",
        ))),
        ThickSetDescriptor::PeriodicBalls { period, centers, radius } => {
            if r > *radius {
                return Err(Error::EmptyAdmissibleRegion(format!("inner radius {r} exceeds ball radius {radius}")));
            }
            let shrink = radius - r;
            let cs: Vec<Vec<f64>> = centers.iter().map(|c| reduce(c, period)).collect();
            scan_cell(period, step, |y, best| {
                for c in &cs {
                    for s in images(period) {
                        let d2: f64 = (0..y.len()).map(|a| sq(y[a] - c[a] - s[a])).sum();
                        let dist = (math::sqrt(d2) - shrink).max(0.0);
                        if dist < best.0 {
                            let norm = math::sqrt(d2);
                            let t = if norm > shrink { shrink / norm } else { 1.0 };
                            best.0 = dist;
                            best.1.clear();
                            best.1.extend((0..y.len()).map(|a| c[a] + s[a] + t * (y[a] - c[a] - s[a])));
                        }
                    }
                }
            })
        }
        ThickSetDescriptor::UnionBoxes { boxes, period: Some(period) } => {
            let shrunk: Vec<(Vec<f64>, Vec<f64>)> = boxes
                .iter()
                .map(|b| reduce_box(b, period))
                .map(|(lo, hi)| {
                    (lo.iter().map(|v| v + r).collect::<Vec<_>>(), hi.iter().map(|v| v - r).collect::<Vec<_>>())
                })
                .filter(|(lo, hi)| lo.iter().zip(hi).all(|(l, h)| l <= h))
                .collect();
            if shrunk.is_empty() {
                return Err(Error::EmptyAdmissibleRegion(format!("no box is wide enough for inner radius {r}")));
            }
            scan_cell(period, step, |y, best| {
                for (lo, hi) in &shrunk {
                    for s in images(period) {
                        let mut d2 = 0.0;
                        for a in 0..y.len() {
                            let c = y[a].clamp(lo[a] + s[a], hi[a] + s[a]);
                            d2 += sq(y[a] - c);
                        }
                        let dist = math::sqrt(d2);
                        if dist < best.0 {
                            best.0 = dist;
                            best.1.clear();
                            best.1.extend((0..y.len()).map(|a| y[a].clamp(lo[a] + s[a], hi[a] + s[a])));
                        }
                    }
                }
            })
        }
        ThickSetDescriptor::PeriodicMask { period, points, bits } => {
            let admissible = eroded_nodes(period, points, bits, r + step)?;
            scan_cell(period, step, |y, best| {
                for c in &admissible {
                    for s in images(period) {
                        let d2: f64 = (0..y.len()).map(|a| sq(y[a] - c[a] - s[a])).sum();
                        if d2 < best.0 * best.0 {
                            best.0 = math::sqrt(d2);
                            best.1.clear();
                            best.1.extend((0..y.len()).map(|a| c[a] + s[a]));
                        }
                    }
                }
            })
        }
    }
}

/// Visit every sample of `[0, period)` at spacing `≤ step` and return the
/// point whose best distance (as computed by `visit`) is largest.
fn scan_cell(
    period: &[f64],
    step: f64,
    mut visit: impl FnMut(&[f64], &mut (f64, Vec<f64>)),
) -> Result<Option<Counterexample>> {
    let n = period.len();
    let counts: Vec<usize> = period.iter().map(|p| (math::ceil(p / step) as usize).max(1)).collect();
    let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    match total {
        Some(t) if t <= MAX_SAMPLES => {}
        _ => return Err(Error::GridTooLarge(format!("{counts:?} samples per axis at step {step}"))),
    }
    let mut idx = vec![0usize; n];
    let mut y = vec![0.0; n];
    let mut best = (f64::INFINITY, Vec::with_capacity(n));
    let mut worst: Option<Counterexample> = None;
    loop {
        for a in 0..n {
            y[a] = idx[a] as f64 * period[a] / counts[a] as f64;
        }
        best.0 = f64::INFINITY;
        visit(&y, &mut best);
        if worst.as_ref().map_or(true, |w| best.0 > w.distance) {
            worst = Some(Counterexample { y: y.clone(), nearest: best.1.clone(), distance: best.0 });
        }
        let mut a = n;
        loop {
            if a == 0 {
                return Ok(worst);
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Cell nodes whose pixels within `reach + half pixel diagonal` are all set;
/// balls of radius `reach` around them lie inside the pixel set.
fn eroded_nodes(period: &[f64], points: &[usize], bits: &[bool], reach: f64) -> Result<Vec<Vec<f64>>> {
    let n = period.len();
    let cell: Vec<f64> = (0..n).map(|a| period[a] / points[a] as f64).collect();
    let half_diag = 0.5 * math::sqrt(cell.iter().map(|h| h * h).sum());
    let radius = reach + half_diag;
    let span: Vec<i64> = cell.iter().map(|h| math::ceil(radius / h) as i64).collect();
    let widths: Vec<usize> = span.iter().map(|s| 2 * *s as usize + 1).collect();
    let offsets: Vec<Vec<i64>> = (0..widths.iter().product::<usize>())
        .map(|mut k| {
            let mut o = vec![0i64; n];
            for a in (0..n).rev() {
                o[a] = (k % widths[a]) as i64 - span[a];
                k /= widths[a];
            }
            o
        })
        .filter(|o| (0..n).map(|a| sq(o[a] as f64 * cell[a])).sum::<f64>() <= radius * radius)
        .collect();
    let strides: Vec<usize> = (0..n).map(|a| points[a + 1..].iter().product()).collect();
    let mut out = Vec::new();
    for flat in 0..bits.len() {
        if !bits[flat] {
            continue;
        }
        let node: Vec<i64> = (0..n).map(|a| ((flat / strides[a]) % points[a]) as i64).collect();
        let ok = offsets.iter().all(|off| {
            let idx: usize =
                (0..n).map(|a| (node[a] + off[a]).rem_euclid(points[a] as i64) as usize * strides[a]).sum();
            bits[idx]
        });
        if ok {
            out.push((0..n).map(|a| node[a] as f64 * cell[a]).collect());
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyAdmissibleRegion(format!("no mask pixel survives erosion by {reach}")));
    }
    Ok(out)
}

fn mask_index(z: &[f64], period: &[f64], points: &[usize]) -> usize {
    let mut idx = 0;
    for a in 0..period.len() {
        let h = period[a] / points[a] as f64;
        let j = math::floor(z[a] / h + 0.5) as i64;
        idx = idx * points[a] + j.rem_euclid(points[a] as i64) as usize;
    }
    idx
}

fn reduce(z: &[f64], period: &[f64]) -> Vec<f64> {
    z.iter().zip(period).map(|(v, p)| v - p * math::floor(v / p)).collect()
}

fn reduce_fixed(z: &[f64], period: &[f64]) -> [f64; 8] {
    let mut y = [0.0; 8];
    for (a, (v, p)) in z.iter().zip(period).enumerate() {
        y[a] = v - p * math::floor(v / p);
    }
    y
}

fn reduce_box(b: &AxisBox, period: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let shift: Vec<f64> = b.lo.iter().zip(period).map(|(v, p)| p * math::floor(v / p)).collect();
    (b.lo.iter().zip(&shift).map(|(v, s)| v - s).collect(), b.hi.iter().zip(&shift).map(|(v, s)| v - s).collect())
}

/// The `3ⁿ` shifts `period·k`, `k ∈ {−1, 0, 1}ⁿ`.
fn images(period: &[f64]) -> impl Iterator<Item = [f64; 8]> + '_ {
    let n = period.len();
    (0..3usize.pow(n as u32)).map(move |mut k| {
        let mut s = [0.0; 8];
        for a in (0..n).rev() {
            s[a] = ((k % 3) as f64 - 1.0) * period[a];
            k /= 3;
        }
        s
    })
}

fn check_period(period: &[f64]) -> Result<()> {
    if period.is_empty() || period.len() > 8 {
        return Err(Error::param("period", format!("need 1 to 8 axes, got {}", period.len())));
    }
    if period.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::param("period", "periods must be finite and > 0"));
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn sq(v: f64) -> f64 {
    v * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn balls(rho: f64) -> ThickSetDescriptor {
        ThickSetDescriptor::lattice_balls(2, 1.0, rho)
    }

    #[test]
    fn full_space_is_thick() {
        let v = check_thickness(&ThickSetDescriptor::FullSpace, 0.1, 5.0, 0.1).unwrap();
        assert!(v.thick && v.counterexample.is_none());
        assert_eq!(minimal_delta(&ThickSetDescriptor::FullSpace, 1.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn half_space_counterexample() {
        let set = ThickSetDescriptor::HalfSpace { normal: vec![1.0, 0.0], offset: 0.0 };
        let v = check_thickness(&set, 1.0, 0.1, 0.01).unwrap();
        assert!(!v.thick);
        let c = v.counterexample.unwrap();
        assert_eq!(c.y, vec![-10.0, 0.0]);
        assert!((c.distance - 10.1).abs() < 1e-12);
        assert!(c.distance > 1.0);
        assert_eq!(minimal_delta(&set, 0.1, 0.01).unwrap(), f64::INFINITY);
    }

    #[test]
    fn lattice_ball_delta() {
        let step = 1e-2;
        let d = minimal_delta(&balls(0.3), 0.25, step).unwrap();
        assert!((d - (0.5f64.sqrt() - 0.05)).abs() <= 2.0 * step, "{d}");
        let d = minimal_delta(&balls(0.3), 0.3, step).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() <= 2.0 * step, "{d}");
        assert!(matches!(minimal_delta(&balls(0.3), 0.31, step), Err(Error::EmptyAdmissibleRegion(_))));
    }

    #[test]
    fn verdict_brackets_minimal_delta() {
        let step = 1e-2;
        let set = balls(0.3);
        let d = minimal_delta(&set, 0.25, step).unwrap();
        assert!(check_thickness(&set, d + 2.0 * step, 0.25, step).unwrap().thick);
        let v = check_thickness(&set, d - 2.0 * step, 0.25, step).unwrap();
        assert!(!v.thick);
        let c = v.counterexample.unwrap();
        assert!(c.distance > d - 2.0 * step);
        // the witness is a genuine admissible center at the reported distance
        let dist: f64 = c.y.iter().zip(&c.nearest).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!((dist - c.distance).abs() < 1e-12);
    }

    #[test]
    fn dilation_scales_delta() {
        let step = 5e-3;
        let base = minimal_delta(&balls(0.3), 0.2, step).unwrap();
        for s in [0.5, 2.0] {
            let scaled = minimal_delta(&balls(0.3).dilate(s).unwrap(), 0.2 * s, step).unwrap();
            assert!((scaled - s * base).abs() <= 2.0 * step, "s={s}");
        }
    }

    #[test]
    fn periodic_boxes() {
        let set = ThickSetDescriptor::UnionBoxes {
            boxes: vec![AxisBox { lo: vec![0.2, 0.2], hi: vec![0.8, 0.8] }],
            period: Some(vec![1.0, 1.0]),
        };
        // admissible square [0.3, 0.7]²; worst point is the corner (0, 0)
        let d = minimal_delta(&set, 0.1, 1e-2).unwrap();
        assert!((d - 0.3 * 2f64.sqrt()).abs() < 1e-9, "{d}");
        let open =
            ThickSetDescriptor::UnionBoxes { boxes: vec![AxisBox { lo: vec![0.0], hi: vec![1.0] }], period: None };
        assert!(matches!(minimal_delta(&open, 0.1, 0.1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mask_erosion_is_conservative() {
        // pixel disc of radius 0.3 on a 40 × 40 cell
        let m = 40;
        let bits: Vec<bool> = (0..m * m)
            .map(|k| {
                let (i, j) = (k / m, k % m);
                let x = (i as f64 / m as f64 + 0.5).rem_euclid(1.0) - 0.5;
                let y = (j as f64 / m as f64 + 0.5).rem_euclid(1.0) - 0.5;
                (x * x + y * y).sqrt() < 0.3
            })
            .collect();
        let set = ThickSetDescriptor::PeriodicMask { period: vec![1.0, 1.0], points: vec![m, m], bits };
        let d_mask = minimal_delta(&set, 0.1, 0.02).unwrap();
        let d_ball = minimal_delta(&balls(0.3), 0.1, 0.02).unwrap();
        assert!(d_mask >= d_ball - 1e-12);
        assert!(d_mask <= 0.5f64.sqrt());
    }

    #[test]
    fn mask_measure_matches_area() {
        let g = PhaseGrid::new(1, 256, PI).unwrap();
        let mask = grid_mask(&balls(0.3), &g).unwrap();
        // ball ∩ box area by chord integration in x, centers at integers
        let rho = 0.3;
        let steps = 200_000;
        let dx = 2.0 * PI / steps as f64;
        let mut expected = 0.0;
        for i in 0..steps {
            let x = -PI + (i as f64 + 0.5) * dx;
            let mut chord = 0.0;
            for cx in -4..=4 {
                let dxc = x - cx as f64;
                if dxc.abs() >= rho {
                    continue;
                }
                let half = (rho * rho - dxc * dxc).sqrt();
                for cy in -4..=4 {
                    let lo = (cy as f64 - half).max(-PI);
                    let hi = (cy as f64 + half).min(PI);
                    chord += (hi - lo).max(0.0);
                }
            }
            expected += chord * dx;
        }
        let err = (mask.measure() - expected).abs() / expected;
        assert!(err < 0.01, "{} vs {expected}", mask.measure());
    }

    #[test]
    fn half_space_mask_is_half() {
        let g = PhaseGrid::new(1, 64, 2.0).unwrap();
        let set = ThickSetDescriptor::HalfSpace { normal: vec![1.0, 0.0], offset: 0.0 };
        let mask = grid_mask(&set, &g).unwrap();
        let half = 0.5 * (4.0 * 4.0);
        assert!((mask.measure() - half).abs() <= 4.0 * g.spacing() + 1e-12);
        assert_eq!(grid_mask(&ThickSetDescriptor::FullSpace, &g).unwrap().count(), g.len());
    }

    #[test]
    fn incommensurate_mask_rejected() {
        let g = PhaseGrid::new(1, 64, PI).unwrap();
        let set = ThickSetDescriptor::PeriodicMask { period: vec![1.0, 1.0], points: vec![4, 4], bits: vec![true; 16] };
        assert!(matches!(grid_mask(&set, &g), Err(Error::GridMismatch(_))));
        let g = PhaseGrid::new(1, 16, 2.0).unwrap();
        assert_eq!(grid_mask(&set, &g).unwrap().count(), g.len());
    }
}
