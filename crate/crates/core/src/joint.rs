//! Maximization of a convex function over the joint numerical range of
//! `(Re T, Im T, T*T)`.
//!
//! The joint range is the image of the unit sphere under
//! `x ↦ (Re⟨Tx,x⟩, Im⟨Tx,x⟩, ‖Tx‖²)`. A convex objective attains its maximum
//! on the boundary, where every point maximizes some linear functional, so
//! the search sweeps linear functionals and then polishes by repeatedly
//! maximizing the linearization at the current point. Each linearization
//! step cannot decrease a convex objective.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::exec;
use crate::operator::{rayleigh_raw, C64};
use crate::rng::GaussianStream;
use crate::spectral;

const SWEEP_STARTS: usize = 8;
const MAX_ASCENT_STEPS: usize = 400;

/// Objective on joint-range coordinates `[p, q, r]`, with its gradient.
pub(crate) trait JointObjective: Sync {
    fn value(&self, c: [f64; 3]) -> f64;
    fn gradient(&self, c: [f64; 3]) -> [f64; 3];
}

/// `p² + q² + r²`, the squared Davis–Wielandt functional.
pub(crate) struct ShellRadius;

impl JointObjective for ShellRadius {
    fn value(&self, [p, q, r]: [f64; 3]) -> f64 {
        p * p + q * q + r * r
    }
    fn gradient(&self, [p, q, r]: [f64; 3]) -> [f64; 3] {
        [2.0 * p, 2.0 * q, 2.0 * r]
    }
}

/// `p² + q² + r`, i.e. `|⟨Tx,x⟩|² + ‖Tx‖²`.
pub(crate) struct PairSum;

impl JointObjective for PairSum {
    fn value(&self, [p, q, r]: [f64; 3]) -> f64 {
        p * p + q * q + r
    }
    fn gradient(&self, [p, q, _]: [f64; 3]) -> [f64; 3] {
        [2.0 * p, 2.0 * q, 1.0]
    }
}

pub(crate) struct JointMax {
    pub value: f64,
    pub vector: DVector<C64>,
}

struct Pencil {
    t: DMatrix<C64>,
    h1: DMatrix<C64>,
    h2: DMatrix<C64>,
    p: DMatrix<C64>,
}

impl Pencil {
    fn new(t: &DMatrix<C64>) -> Self {
        let ta = t.adjoint();
        Self {
            h1: (t + &ta) * C64::new(0.5, 0.0),
            h2: (t - &ta) * C64::new(0.0, -0.5),
            p: &ta * t,
            t: t.clone(),
        }
    }

    fn coords(&self, x: &DVector<C64>) -> [f64; 3] {
        let z = rayleigh_raw(&self.t, x);
        let tx = &self.t * x;
        [z.re, z.im, tx.norm_squared()]
    }

    fn top_vector(&self, u: [f64; 3]) -> Result<DVector<C64>> {
        let h = &self.h1 * C64::new(u[0], 0.0) + &self.h2 * C64::new(u[1], 0.0) + &self.p * C64::new(u[2], 0.0);
        Ok(spectral::eigh(&h)?.top_vector())
    }
}

/// Fibonacci lattice on the hemisphere `u₃ ≥ 0`.
///
/// Both objectives are nondecreasing in `r ≥ 0`, so a maximizer is exposed by
/// a direction with nonnegative third component.
pub(crate) fn hemisphere_directions(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = (i as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden_angle * i as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

pub(crate) fn maximize_joint(
    t: &DMatrix<C64>,
    objective: &impl JointObjective,
    extra_starts: &[DVector<C64>],
    cfg: &ToleranceConfig,
) -> Result<JointMax> {
    let pencil = Pencil::new(t);
    let dirs = hemisphere_directions(cfg.sphere_directions);
    let swept: Vec<Result<(f64, DVector<C64>)>> = exec::map_indexed(dirs.len(), |i| {
        let x = pencil.top_vector(dirs[i])?;
        Ok((objective.value(pencil.coords(&x)), x))
    });
    let swept: Vec<(f64, DVector<C64>)> = swept.into_iter().collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..swept.len()).collect();
    order.sort_by(|&a, &b| swept[b].0.total_cmp(&swept[a].0).then(a.cmp(&b)));
    let mut starts: Vec<DVector<C64>> = order.iter().take(SWEEP_STARTS).map(|&i| swept[i].1.clone()).collect();
    starts.extend(extra_starts.iter().map(|x| x.normalize()));
    let mut g = GaussianStream::new(cfg.rng_seed, 0x6a_6f69_6e74);
    for _ in 0..cfg.oracle_samples {
        starts.push(g.unit_vector(t.nrows()));
    }

    let polished: Vec<Result<(f64, DVector<C64>)>> =
        exec::map_indexed(starts.len(), |i| ascend(&pencil, objective, starts[i].clone(), cfg.refine_tol));
    let mut best: Option<(f64, DVector<C64>)> = None;
    for r in polished {
        let (v, x) = r?;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, x));
        }
    }
    let (value, vector) = best.expect("at least one start");
    Ok(JointMax { value, vector })
}

fn ascend(
    pencil: &Pencil,
    objective: &impl JointObjective,
    mut x: DVector<C64>,
    tol: f64,
) -> Result<(f64, DVector<C64>)> {
    let mut c = pencil.coords(&x);
    let mut v = objective.value(c);
    for _ in 0..MAX_ASCENT_STEPS {
        let y = pencil.top_vector(objective.gradient(c))?;
        let cy = pencil.coords(&y);
        let vy = objective.value(cy);
        if vy <= v {
            break;
        }
        let gain = vy - v;
        x = y;
        c = cy;
        v = vy;
        if gain <= tol * 1e-3 * v.max(1.0) {
            break;
        }
    }
    Ok((v, x))
}
