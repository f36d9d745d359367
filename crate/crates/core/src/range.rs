//! Numerical range geometry: support-function sweeps over the circle of
//! directions, membership of a point in `W(M)`, and witness construction.
//!
//! For a direction `θ`, the largest eigenvalue of `Re(e^{iθ}M)` is the
//! support value of `W(M)` in direction `e^{-iθ}`, and its top eigenvector
//! lands on the boundary of `W(M)`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::exec;
use crate::operator::{inner, rayleigh_raw, rotated_real_part, ComplexMatrix, UnitVector, C64};
use crate::optim::golden_max;
use crate::spectral::{self, Eigh};

/// Most local maxima of a sweep that are refined.
const MAX_CANDIDATES: usize = 8;
/// Most bisections of a polygon edge while chasing a boundary point.
const MAX_EDGE_SPLITS: usize = 96;

/// Support values of `W(M)` sampled on a uniform grid of directions.
#[derive(Clone, Debug, Serialize)]
pub struct SupportProfile {
    pub angles: Vec<f64>,
    pub support_values: Vec<f64>,
    pub witnesses: Vec<UnitVector>,
}

/// Samples `λ_max(Re(e^{iθ}M))` and its eigenvector at `cfg.sweep_points` angles.
pub fn support_profile(m: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SupportProfile> {
    cfg.validate()?;
    let angles = sweep_angles(cfg.sweep_points);
    let eigs = rotated_eigs(m.as_matrix(), &angles)?;
    Ok(SupportProfile {
        support_values: eigs.iter().map(Eigh::max).collect(),
        witnesses: eigs.iter().map(|e| UnitVector::from_na(e.top_vector())).collect(),
        angles,
    })
}

pub(crate) fn sweep_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

pub(crate) fn rotated_eig(m: &DMatrix<C64>, theta: f64) -> Result<Eigh> {
    spectral::eigh(&rotated_real_part(m, theta))
}

pub(crate) fn rotated_eigs(m: &DMatrix<C64>, angles: &[f64]) -> Result<Vec<Eigh>> {
    exec::map_indexed(angles.len(), |i| rotated_eig(m, angles[i])).into_iter().collect()
}

/// Result of maximizing a function of the angle.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CircleMax {
    pub theta: f64,
    pub value: f64,
    /// Best value among the uniform samples.
    pub sweep_best: f64,
    /// Grid spacing of the uniform samples.
    pub step: f64,
}

/// Refines the uniform samples `values` (taken at `sweep_angles(values.len())`)
/// of a `lipschitz`-Lipschitz function `f` to a near-global maximum.
///
/// Every sampled local maximum within `lipschitz·step` of the best sample can
/// hide the global maximum, so each of them is refined by golden section on
/// its two neighboring grid cells.
pub(crate) fn refine_circle_max(
    values: &[f64],
    f: &(impl Fn(f64) -> Result<f64> + Sync),
    lipschitz: f64,
    tol: f64,
) -> Result<CircleMax> {
    let n = values.len();
    let step = TAU / n as f64;
    let best_idx = exec::argmax_by_key(values, |v| *v).unwrap_or(0);
    let sweep_best = values[best_idx];
    let floor = sweep_best - lipschitz * step;
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = values[i];
            v >= floor && v >= values[(i + n - 1) % n] && v >= values[(i + 1) % n]
        })
        .collect();
    if !candidates.contains(&best_idx) {
        candidates.push(best_idx);
    }
    candidates.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    candidates.truncate(MAX_CANDIDATES);

    let refined: Vec<Result<(f64, f64)>> = exec::map_indexed(candidates.len(), |k| {
        let i = candidates[k];
        let theta = step * i as f64;
        golden_max(f, theta - step, theta + step, (theta, values[i]), tol)
    });
    let mut best = (step * best_idx as f64, sweep_best);
    for r in refined {
        let (theta, v) = r?;
        if v > best.1 {
            best = (theta, v);
        }
    }
    Ok(CircleMax {
        theta: best.0.rem_euclid(TAU),
        value: best.1,
        sweep_best,
        step,
    })
}

/// Outcome of a membership test `z ∈ W(M)`.
#[derive(Clone, Debug)]
pub(crate) struct Membership {
    /// `min_θ λ_max(Re(e^{iθ}(M − zI)))`: the depth of `z` inside `W(M)`
    /// when nonnegative, minus the distance to `W(M)` otherwise.
    pub margin: f64,
    /// Unit vector whose Rayleigh quotient is as close to `z` as the
    /// construction could get.
    pub witness: DVector<C64>,
    /// `|⟨M·witness, witness⟩ − z|`.
    pub residual: f64,
}

pub(crate) fn membership(m: &DMatrix<C64>, z: C64, cfg: &ToleranceConfig) -> Result<Membership> {
    let n = m.nrows();
    let a = m - DMatrix::<C64>::identity(n, n) * z;
    let lipschitz = a.norm();
    let angles = sweep_angles(cfg.sweep_points);
    let eigs = rotated_eigs(&a, &angles)?;
    let neg: Vec<f64> = eigs.iter().map(|e| -e.max()).collect();
    let f = |t: f64| rotated_eig(&a, t).map(|e| -e.max());
    let opt = refine_circle_max(&neg, &f, lipschitz, cfg.refine_tol)?;
    let margin = -opt.value;

    let boundary: Vec<BoundaryPoint> = angles
        .iter()
        .zip(&eigs)
        .map(|(&theta, e)| BoundaryPoint::new(&a, theta, e.top_vector()))
        .collect();
    let witness = point_witness(&a, boundary, cfg.refine_tol)?;
    let residual = rayleigh_raw(&a, &witness).norm();
    Ok(Membership {
        margin,
        witness,
        residual,
    })
}

#[derive(Clone, Debug)]
pub(crate) struct BoundaryPoint {
    pub theta: f64,
    pub point: C64,
    pub vector: DVector<C64>,
}

impl BoundaryPoint {
    pub(crate) fn new(a: &DMatrix<C64>, theta: f64, vector: DVector<C64>) -> Self {
        Self {
            theta,
            point: rayleigh_raw(a, &vector),
            vector,
        }
    }
}

/// A unit vector `x` with `⟨Ax,x⟩` as close to 0 as possible, built from
/// boundary points of `W(A)` sorted by angle.
///
/// Takes the boundary point `p` farthest from the origin and finds where the
/// ray from `p` through the origin leaves the inscribed polygon. If that exit
/// lies beyond the origin, the origin sits on a chord between `p` and a point
/// on a polygon edge, and two segment interpolations reach it. Otherwise the
/// exit edge is split at its middle direction until it does.
pub(crate) fn point_witness(
    a: &DMatrix<C64>,
    mut pts: Vec<BoundaryPoint>,
    tol: f64,
) -> Result<DVector<C64>> {
    let scale = pts.iter().map(|p| p.point.norm()).fold(0.0, f64::max);
    let far = exec::argmax_by_key(&pts, |p| p.point.norm()).unwrap_or(0);
    if scale <= f64::MIN_POSITIVE {
        return Ok(pts[far].vector.clone());
    }
    let pa = pts[far].clone();

    // Collinear or thin ranges: the origin may lie on a chord from `pa`.
    let chord_tol = 1e-14 * scale;
    let mut chord: Option<(usize, f64)> = None;
    for (j, q) in pts.iter().enumerate() {
        if let Some(d) = segment_distance(pa.point, q.point) {
            if d <= chord_tol && chord.is_none_or(|(_, bd)| d < bd) {
                chord = Some((j, d));
            }
        }
    }
    if let Some((j, _)) = chord {
        return Ok(hit_on_segment(a, &pa.vector, &pts[j].vector, C64::new(0.0, 0.0), tol));
    }

    let mut best_fallback = pts[nearest_index(&pts)].vector.clone();
    for _ in 0..MAX_EDGE_SPLITS {
        let Some((j, s)) = ray_exit(pa.point, &pts) else {
            break;
        };
        let k = (j + 1) % pts.len();
        let q = pa.point * (1.0 - s);
        let yq = hit_on_segment(a, &pts[j].vector, &pts[k].vector, q, tol);
        if s >= 1.0 {
            return Ok(hit_on_segment(a, &pa.vector, &yq, C64::new(0.0, 0.0), tol));
        }
        if rayleigh_raw(a, &yq).norm() < rayleigh_raw(a, &best_fallback).norm() {
            best_fallback = yq;
        }
        let (t0, mut t1) = (pts[j].theta, pts[k].theta);
        if t1 <= t0 {
            t1 += TAU;
        }
        let mid = (0.5 * (t0 + t1)).rem_euclid(TAU);
        if (t1 - t0) < 1e-15 {
            break;
        }
        let e = rotated_eig(a, mid)?;
        pts.push(BoundaryPoint::new(a, mid, e.top_vector()));
        pts.sort_by(|x, y| x.theta.total_cmp(&y.theta));
    }
    Ok(best_fallback)
}

fn nearest_index(pts: &[BoundaryPoint]) -> usize {
    exec::argmax_by_key(pts, |p| -p.point.norm()).unwrap_or(0)
}

/// Distance from the origin to segment `[p, q]` when the origin projects
/// strictly inside it.
fn segment_distance(p: C64, q: C64) -> Option<f64> {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return None;
    }
    let t = -(p.re * d.re + p.im * d.im) / len2;
    if !(0.0..=1.0).contains(&t) {
        return None;
    }
    Some((p + d * t).norm())
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Farthest exit of the ray `p + s·(−p)`, `s > 0`, through the polygon
/// edges; returns the edge index and `s`.
fn ray_exit(p: C64, pts: &[BoundaryPoint]) -> Option<(usize, f64)> {
    let d = -p;
    let n = pts.len();
    let mut best: Option<(usize, f64)> = None;
    for j in 0..n {
        let u = pts[j].point;
        let e = pts[(j + 1) % n].point - u;
        let den = cross(d, e);
        if den.abs() <= 1e-300 || den.abs() <= 1e-15 * d.norm() * e.norm() {
            continue;
        }
        let r = u - p;
        let s = cross(r, e) / den;
        let t = cross(r, d) / den;
        if s > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&t) && best.is_none_or(|(_, bs)| s > bs) {
            best = Some((j, s));
        }
    }
    best
}

/// A unit vector in `span{y1, y2}` whose Rayleigh quotient is the point of
/// the segment `[⟨Ay1,y1⟩, ⟨Ay2,y2⟩]` nearest to `target`.
///
/// After the affine change `B = (A − z1)/(z2 − z1)` the endpoints sit at 0
/// and 1. A phase on `y2` removes the imaginary cross term, so along
/// `(1−t)y1 + t·e^{iφ}y2` the quotient of `B` stays real and bisection on
/// `t` reaches any point of `[0, 1]`.
pub(crate) fn hit_on_segment(
    a: &DMatrix<C64>,
    y1: &DVector<C64>,
    y2: &DVector<C64>,
    target: C64,
    tol: f64,
) -> DVector<C64> {
    let y1 = y1.normalize();
    let y2 = y2.normalize();
    let z1 = rayleigh_raw(a, &y1);
    let z2 = rayleigh_raw(a, &y2);
    let d = z2 - z1;
    let len2 = d.norm_sqr();
    if len2 <= (1e-15 * (z1.norm() + z2.norm())).powi(2) || len2 == 0.0 {
        return if (z2 - target).norm() < (z1 - target).norm() { y2 } else { y1 };
    }
    let s = (((target - z1) * d.conj()).re / len2).clamp(0.0, 1.0);
    if s == 0.0 {
        return y1;
    }
    if s == 1.0 {
        return y2;
    }
    let n = a.nrows();
    let b = (a - DMatrix::<C64>::identity(n, n) * z1) / d;
    let k = (&b - b.adjoint()) / C64::new(0.0, 2.0);
    let c = inner(&(&k * &y2), &y1);
    let phase = if c.norm() > 0.0 {
        C64::new(0.0, 1.0) * c.conj() / c.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let y2 = y2 * phase;
    let at = |t: f64| -> DVector<C64> { (&y1 * C64::new(1.0 - t, 0.0) + &y2 * C64::new(t, 0.0)).normalize() };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = rayleigh_raw(&b, &at(mid)).re - s;
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * 1e-6 {
            break;
        }
    }
    let x_lo = at(lo);
    let x_hi = at(hi);
    if (rayleigh_raw(&b, &x_lo).re - s).abs() <= (rayleigh_raw(&b, &x_hi).re - s).abs() {
        x_lo
    } else {
        x_hi
    }
}
