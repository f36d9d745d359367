//! Brute-force oracles that share no numerical code with the library.
//!
//! Matrices are plain row-major `Vec<Vec<C64>>`. Eigenvalues come from a
//! cyclic Jacobi sweep, radii from dense sampling of the unit sphere followed
//! by projected gradient polishing, and the deciders from explicit grids.

#![allow(dead_code)]

use opgeom::{ComplexMatrix, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<C64>>;

pub fn dense(t: &ComplexMatrix) -> Dense {
    let n = t.n();
    (0..n).map(|r| (0..n).map(|c| t[(r, c)]).collect()).collect()
}

pub fn matvec(a: &Dense, x: &[C64]) -> Vec<C64> {
    a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// `⟨a, b⟩ = Σ aᵢ conj(bᵢ)`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(x: &mut [C64]) {
    let s = norm(x);
    x.iter_mut().for_each(|z| *z /= s);
}

pub fn add_scaled(a: &Dense, g: C64, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + g * y).collect())
        .collect()
}

fn gram(a: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i].conj() * a[k][j]).sum()).collect())
        .collect()
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(h: &Dense) -> Vec<f64> {
    let n = h.len();
    let mut a = h.clone();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].norm_sqr()).sum();
        let diag: f64 = (0..n).map(|i| a[i][i].norm_sqr()).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.norm() == 0.0 {
                    continue;
                }
                // Rotate the phase of index q so that a[p][q] becomes real.
                let phase = C64::from_polar(1.0, -apq.arg());
                for row in a.iter_mut() {
                    row[q] *= phase;
                }
                for v in a[q].iter_mut() {
                    *v *= phase.conj();
                }
                let apq = a[p][q].re;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * c - y * s;
                    row[q] = x * s + y * c;
                }
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = x * c - y * s;
                    a[q][k] = x * s + y * c;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn spectral_norm(a: &Dense) -> f64 {
    hermitian_eigenvalues(&gram(a)).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Radius {
    /// `max |⟨Tx,x⟩|`.
    Numerical,
    /// `min |⟨Tx,x⟩|`.
    Crawford,
    /// `max √(|⟨Tx,x⟩|² + ‖Tx‖⁴)`.
    Shell,
}

/// Objective to maximize on the sphere; the Crawford number is the negated
/// square so that the function stays smooth at zero.
fn objective(a: &Dense, kind: Radius, x: &[C64]) -> f64 {
    let tx = matvec(a, x);
    let z = dot(&tx, x);
    match kind {
        Radius::Numerical => z.norm_sqr(),
        Radius::Crawford => -z.norm_sqr(),
        Radius::Shell => {
            let r = tx.iter().map(|v| v.norm_sqr()).sum::<f64>();
            z.norm_sqr() + r * r
        }
    }
}

fn finish(kind: Radius, v: f64) -> f64 {
    match kind {
        Radius::Numerical => v.max(0.0).sqrt(),
        Radius::Crawford => (-v).max(0.0).sqrt(),
        Radius::Shell => v.max(0.0).sqrt(),
    }
}

fn random_unit(rng: &mut StdRng, n: usize) -> Vec<C64> {
    let mut x: Vec<C64> = (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    normalize(&mut x);
    x
}

/// Projected gradient ascent with central-difference gradients and an
/// adaptive step.
fn polish(a: &Dense, kind: Radius, mut x: Vec<C64>) -> f64 {
    let n = x.len();
    let f = |x: &[C64]| {
        let mut y = x.to_vec();
        normalize(&mut y);
        objective(a, kind, &y)
    };
    let mut fx = f(&x);
    let mut step = 0.1;
    let h = 1e-7;
    for _ in 0..20_000 {
        let mut grad = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for (k, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += dir * h;
                xm[i] -= dir * h;
                let d = (f(&xp) - f(&xm)) / (2.0 * h);
                if k == 0 {
                    grad[i].re = d;
                } else {
                    grad[i].im = d;
                }
            }
        }
        let radial = dot(&grad, &x).re;
        grad.iter_mut().zip(&x).for_each(|(g, xi)| *g -= xi * radial);
        let gn = norm(&grad);
        if gn < 1e-14 {
            break;
        }
        let mut y: Vec<C64> = x.iter().zip(&grad).map(|(xi, g)| xi + g * (step / gn)).collect();
        normalize(&mut y);
        let fy = objective(a, kind, &y);
        if fy > fx {
            x = y;
            fx = fy;
            step *= 1.5;
        } else {
            step *= 0.5;
            if step < 1e-15 {
                break;
            }
        }
    }
    fx
}

/// Dense sampling of `samples` Gaussian unit vectors, then polishing of the
/// best `keep` of them.
pub fn sphere_oracle(t: &ComplexMatrix, kind: Radius, samples: usize, seed: u64) -> f64 {
    let a = dense(t);
    let n = a.len();
    let mut rng = StdRng::seed_from_u64(seed);
    let keep = 6;
    let mut best: Vec<(f64, Vec<C64>)> = Vec::with_capacity(keep + 1);
    for _ in 0..samples {
        let x = random_unit(&mut rng, n);
        let v = objective(&a, kind, &x);
        if best.len() < keep || v > best[best.len() - 1].0 {
            best.push((v, x));
            best.sort_by(|p, q| q.0.total_cmp(&p.0));
            best.truncate(keep);
        }
    }
    let top = best
        .into_iter()
        .map(|(_, x)| polish(&a, kind, x))
        .fold(f64::NEG_INFINITY, f64::max);
    finish(kind, top)
}

/// `min ‖T + γS‖ − ‖T‖` over a `side × side` grid on `|Re γ|, |Im γ| ≤ R` with
/// `R = 2‖T‖/‖S‖`, followed by compass refinement around the best node.
pub fn bj_grid_defect(t: &ComplexMatrix, s: &ComplexMatrix, side: usize) -> f64 {
    let (a, b) = (dense(t), dense(s));
    let nt = spectral_norm(&a);
    let ns = spectral_norm(&b);
    let radius = 2.0 * nt / ns;
    let f = |g: C64| spectral_norm(&add_scaled(&a, g, &b));
    let h = 2.0 * radius / (side - 1) as f64;
    let mut best = (f64::INFINITY, C64::new(0.0, 0.0));
    for i in 0..side {
        for j in 0..side {
            let g = C64::new(-radius + h * i as f64, -radius + h * j as f64);
            let v = f(g);
            if v < best.0 {
                best = (v, g);
            }
        }
    }
    let mut step = h;
    while step > 1e-12 * radius.max(1.0) {
        let mut moved = false;
        for d in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
            let g = best.1 + d * step;
            let v = f(g);
            if v < best.0 {
                best = (v, g);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best.0 - nt
}

/// `‖T‖ + ‖S‖ − max ‖T + λS‖` over `points` equispaced unimodular λ, with
/// golden-section refinement on the best arc.
pub fn parallel_circle_deficit(t: &ComplexMatrix, s: &ComplexMatrix, points: usize) -> f64 {
    let (a, b) = (dense(t), dense(s));
    let f = |theta: f64| spectral_norm(&add_scaled(&a, C64::from_polar(1.0, theta), &b));
    let step = std::f64::consts::TAU / points as f64;
    let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
    for i in 0..points {
        let v = f(step * i as f64);
        if v > bv {
            bi = i;
            bv = v;
        }
    }
    let (mut lo, mut hi) = (step * (bi as f64 - 1.0), step * (bi as f64 + 1.0));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    spectral_norm(&a) + spectral_norm(&b) - bv.max(f1).max(f2)
}
