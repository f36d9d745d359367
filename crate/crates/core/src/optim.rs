//! One- and two-dimensional local searches used by the sweeps.

use num_complex::Complex64;

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns the best point seen, including both bracket ends, so the result is
/// never worse than the caller's starting sample at the bracket midpoint.
pub(crate) fn golden_max(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    mid_value: (f64, f64),
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (a, b);
    let mut best = mid_value;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    let mut iters = 0;
    while hi - lo > tol && iters < 200 {
        iters += 1;
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Compass search for a minimum of `f` over the complex plane, restricted to
/// the disk `|γ| ≤ radius`.
pub(crate) struct CompassResult {
    pub point: Complex64,
    pub value: f64,
    pub evaluations: usize,
}

pub(crate) fn compass_min(
    f: &impl Fn(Complex64) -> Result<f64>,
    start: Complex64,
    start_value: f64,
    initial_step: f64,
    min_step: f64,
    radius: f64,
    max_evals: usize,
) -> Result<CompassResult> {
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut x = start;
    let mut fx = start_value;
    let mut step = initial_step;
    let mut evals = 0;
    while step >= min_step && evals < max_evals {
        let mut improved = false;
        for d in dirs {
            let cand = x + d * step;
            if cand.norm() > radius {
                continue;
            }
            let v = f(cand)?;
            evals += 1;
            if v < fx {
                x = cand;
                fx = v;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(CompassResult { point: x, value: fx, evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_quadratic_peak() {
        let f = |x: f64| Ok(-(x - 0.3).powi(2));
        let (x, v) = golden_max(&f, 0.0, 1.0, (0.5, -0.04), 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v > -1e-12);
    }

    #[test]
    fn compass_finds_bowl_minimum() {
        let target = Complex64::new(0.4, -0.7);
        let f = |z: Complex64| Ok((z - target).norm_sqr());
        let r = compass_min(&f, Complex64::new(0.0, 0.0), target.norm_sqr(), 0.5, 1e-10, 3.0, 10_000).unwrap();
        assert!((r.point - target).norm() < 1e-9);
    }
}
