//! Scalar identities on vector pairs and the radius refinement inequalities,
//! including the inner infimum searches over a complex shift.

use nalgebra::DMatrix;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::exec;
use crate::joint::{maximize_joint, PairSum};
use crate::operator::{check_dim, inner, op_norm, ComplexMatrix, ComplexVector, UnitVector, C64};
use crate::optim::compass_min;
use crate::radii::{crawford_raw, numerical_radius_raw};
use crate::range::{refine_circle_max, rotated_eig, rotated_eigs, sweep_angles};
use crate::spectral;
use crate::verdict::{Condition, EquivalenceBattery, InequalityReport, OptimizerTrace};

/// Side of the square γ grid used by the infimum searches.
pub const GAMMA_GRID_SIDE: usize = 41;
/// Angles used for the cheap Crawford estimate on the γ grid.
const COARSE_ANGLES: usize = 48;

fn gram_defect(a: &ComplexVector, b: &ComplexVector, shifted: &ComplexVector) -> (f64, f64) {
    let nb2 = b.norm().powi(2);
    let lhs = shifted.norm().powi(2) * nb2 - inner(shifted.as_vector(), b.as_vector()).norm_sqr();
    let rhs = a.norm().powi(2) * nb2 - inner(a.as_vector(), b.as_vector()).norm_sqr();
    (lhs, rhs)
}

/// `|(‖a+γb‖²‖b‖² − |⟨a+γb,b⟩|²) − (‖a‖²‖b‖² − |⟨a,b⟩|²)|`, which vanishes
/// for every complex γ.
pub fn gram_shift_residual(a: &ComplexVector, b: &ComplexVector, gamma: C64) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let (lhs, rhs) = gram_defect(a, b, &a.add_scaled(gamma, b));
    Ok((lhs - rhs).abs())
}

/// The real-part analogue of [`gram_shift_residual`], valid for real γ.
pub fn real_gram_shift_residual(a: &ComplexVector, b: &ComplexVector, gamma: f64) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let shifted = a.add_scaled(C64::new(gamma, 0.0), b);
    let nb2 = b.norm().powi(2);
    let lhs = shifted.norm().powi(2) * nb2 - inner(shifted.as_vector(), b.as_vector()).re.powi(2);
    let rhs = a.norm().powi(2) * nb2 - inner(a.as_vector(), b.as_vector()).re.powi(2);
    Ok((lhs - rhs).abs())
}

/// Distance from `a` to the line spanned by `b`, with the closed-form
/// minimizer and the Cauchy–Schwarz equality test.
#[derive(Clone, Debug)]
pub struct BestApproximation {
    pub gamma_star: C64,
    /// `min_γ ‖a + γb‖²`.
    pub infimum: f64,
    /// `‖b‖²·infimum = ‖a‖²‖b‖² − |⟨a,b⟩|²`.
    pub identity: InequalityReport,
    /// Linear dependence of `a` and `b` by distance, against Cauchy–Schwarz equality.
    pub dependence: EquivalenceBattery,
}

pub fn best_approximation_identity(
    a: &ComplexVector,
    b: &ComplexVector,
    cfg: &ToleranceConfig,
) -> Result<BestApproximation> {
    check_dim(a.len(), b.len())?;
    if b.is_zero() {
        return Err(Error::ZeroVector);
    }
    let (na, nb) = (a.norm(), b.norm());
    let ab = inner(a.as_vector(), b.as_vector());
    let gamma_star = -ab / (nb * nb);
    let infimum = a.add_scaled(gamma_star, b).norm().powi(2);
    let lhs = nb * nb * infimum;
    let rhs = na * na * nb * nb - ab.norm_sqr();
    let scale = (na * nb).powi(2);
    let identity = InequalityReport::equality(
        "best-approximation",
        lhs / scale.max(f64::MIN_POSITIVE),
        rhs / scale.max(f64::MIN_POSITIVE),
        1e-10,
    );
    let thr = cfg.threshold(na * nb);
    let distance = nb * infimum.sqrt();
    let dependence = EquivalenceBattery::new(
        "linear-dependence",
        vec![
            Condition::new("zero-distance", distance, 0.0, -distance * distance / (2.0 * na * nb).max(f64::MIN_POSITIVE), thr),
            Condition::new("cauchy-schwarz-equality", ab.norm(), na * nb, ab.norm() - na * nb, thr),
        ],
    );
    Ok(BestApproximation {
        gamma_star,
        infimum,
        identity,
        dependence,
    })
}

/// `2|⟨a,e⟩⟨e,b⟩| ≤ ‖a‖‖b‖ + |⟨a,b⟩|` for a unit vector `e`.
pub fn buzano_check(
    a: &ComplexVector,
    b: &ComplexVector,
    e: &UnitVector,
    cfg: &ToleranceConfig,
) -> Result<InequalityReport> {
    check_dim(a.len(), b.len())?;
    check_dim(a.len(), e.len())?;
    if e.norm_defect() > cfg.unit_tol {
        return Err(Error::NotUnit {
            defect: e.norm_defect(),
            tol: cfg.unit_tol,
        });
    }
    let ev = e.as_vector();
    let lhs = 2.0 * (inner(a.as_vector(), ev) * inner(ev, b.as_vector())).norm();
    let rhs = a.norm() * b.norm() + inner(a.as_vector(), b.as_vector()).norm();
    Ok(InequalityReport::new("buzano", lhs, rhs, cfg.decision_margin))
}

/// The norm–Crawford–radius chain
/// `‖T‖² + c²(T) ≤ max_x (‖Tx‖² + |⟨Tx,x⟩|²) ≤ 4w²(T)`, reported as the
/// outer comparison followed by its two links.
pub fn norm_crawford_radius_check(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Vec<InequalityReport>> {
    cfg.validate()?;
    let m = t.as_matrix();
    let norm = op_norm(t)?;
    let w = numerical_radius_raw(m, cfg)?;
    let c = crawford_raw(m, cfg, cfg.sweep_points, false)?.value;
    let starts = [norm.witness.as_vector().clone(), w.witness.as_vector().clone()];
    let peak = maximize_joint(m, &PairSum, &starts, cfg)?.value;
    let left = norm.value.powi(2) + c * c;
    let right = 4.0 * w.value * w.value;
    let dm = cfg.decision_margin;
    Ok(vec![
        InequalityReport::new("norm^2+c^2<=4w^2", left, right, dm),
        InequalityReport::new("norm^2+c^2<=max", left, peak, dm),
        InequalityReport::new("max<=4w^2", peak, right, dm),
    ])
}

/// `c(T − γI)` from precomputed bottom eigenvalues of `Re(e^{iθ}T)`.
///
/// Shifting by a scalar moves every eigenvalue of the rotated Hermitian part
/// by `Re(e^{iθ}γ)`, so one sweep of `T` serves every γ.
struct ShiftedCrawford<'a> {
    t: &'a DMatrix<C64>,
    angles: Vec<f64>,
    bottoms: Vec<f64>,
}

impl<'a> ShiftedCrawford<'a> {
    fn new(t: &'a DMatrix<C64>, points: usize) -> Result<Self> {
        let angles = sweep_angles(points);
        let bottoms = rotated_eigs(t, &angles)?.iter().map(|e| e.min()).collect();
        Ok(Self { t, angles, bottoms })
    }

    fn shifted_values(&self, gamma: C64) -> Vec<f64> {
        self.angles
            .iter()
            .zip(&self.bottoms)
            .map(|(&th, &b)| b - (C64::from_polar(1.0, th) * gamma).re)
            .collect()
    }

    fn sampled(&self, gamma: C64) -> f64 {
        self.shifted_values(gamma).into_iter().fold(0.0, f64::max)
    }

    fn refined(&self, gamma: C64, cfg: &ToleranceConfig) -> Result<f64> {
        let values = self.shifted_values(gamma);
        let n = self.t.nrows();
        let shifted = self.t - DMatrix::<C64>::identity(n, n) * gamma;
        let lipschitz = shifted.norm();
        let step = self.angles[1];
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if best < -lipschitz * step {
            return Ok(0.0);
        }
        let f = |th: f64| rotated_eig(self.t, th).map(|e| e.min() - (C64::from_polar(1.0, th) * gamma).re);
        Ok(refine_circle_max(&values, &f, lipschitz, cfg.refine_tol)?.value.max(0.0))
    }
}

/// Crawford number from a plain sweep, without refinement.
fn sampled_crawford(m: &DMatrix<C64>, points: usize) -> Result<f64> {
    let eigs = rotated_eigs(m, &sweep_angles(points))?;
    Ok(eigs.iter().map(|e| e.min()).fold(0.0, f64::max))
}

struct Infimum {
    value: f64,
    trace: OptimizerTrace,
}

/// Square grid of side `side` over `[−r, r]²`, keeping points in the disk.
fn disk_grid(radius: f64, side: usize) -> Vec<C64> {
    let h = 2.0 * radius / (side - 1) as f64;
    let mut out = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let g = C64::new(-radius + h * i as f64, -radius + h * j as f64);
            if g.norm() <= radius * (1.0 + 1e-12) {
                out.push(g);
            }
        }
    }
    out
}

/// Grid minimum of `f`; ties go to the first grid index.
fn grid_min(f: &(impl Fn(C64) -> Result<f64> + Sync), grid: &[C64]) -> Result<(usize, f64)> {
    let values: Vec<f64> = exec::map_indexed(grid.len(), |i| f(grid[i])).into_iter().collect::<Result<_>>()?;
    let i = exec::argmax_by_key(&values, |v| -v).unwrap_or(0);
    Ok((i, values[i]))
}

/// Estimates `inf_γ f(γ)` over the disk `|γ| ≤ radius`: grid on the cheap
/// surrogate, compass search on the surrogate, then compass search on `fine`.
/// If the result touches the boundary the disk is doubled once.
fn infimum_search(
    coarse: &(impl Fn(C64) -> Result<f64> + Sync),
    fine: &(impl Fn(C64) -> Result<f64> + Sync),
    radius: f64,
    side: usize,
    cfg: &ToleranceConfig,
) -> Result<Infimum> {
    let mut radius = radius.max(f64::MIN_POSITIVE);
    let mut evaluations = 0;
    let mut expanded = false;
    loop {
        let grid = disk_grid(radius, side);
        evaluations += grid.len();
        let (i, v) = grid_min(coarse, &grid)?;
        let h = 2.0 * radius / (side - 1) as f64;
        let c1 = compass_min(coarse, grid[i], v, h, h * 1e-3, radius, 2_000)?;
        let start = fine(c1.point)?;
        let c2 = compass_min(fine, c1.point, start, h * 1e-2, cfg.refine_tol * radius.max(1.0), radius, 2_000)?;
        evaluations += c1.evaluations + c2.evaluations + 1;
        let touched = c2.point.norm() >= radius * (1.0 - 2.0 / (side - 1) as f64);
        if touched && !expanded {
            expanded = true;
            radius *= 2.0;
            continue;
        }
        return Ok(Infimum {
            value: c2.value,
            trace: OptimizerTrace {
                grid_points: grid.len(),
                radius,
                gamma_re: c2.point.re,
                gamma_im: c2.point.im,
                value: c2.value,
                touched_boundary: touched,
                evaluations,
            },
        });
    }
}

/// `‖T‖² − w²(T) ≤ inf_γ {‖T − γI‖² − c²(T − γI)}`.
pub fn norm_radius_gap_bound(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<InequalityReport> {
    norm_radius_gap_bound_on_grid(t, cfg, GAMMA_GRID_SIDE)
}

pub fn norm_radius_gap_bound_on_grid(t: &ComplexMatrix, cfg: &ToleranceConfig, side: usize) -> Result<InequalityReport> {
    cfg.validate()?;
    check_grid_side(side)?;
    let m = t.as_matrix();
    let n = t.n();
    let norm = spectral::spectral_norm(m)?;
    let w = numerical_radius_raw(m, cfg)?.value;
    let coarse_c = ShiftedCrawford::new(m, COARSE_ANGLES)?;
    let fine_c = ShiftedCrawford::new(m, cfg.sweep_points)?;
    let eye = DMatrix::<C64>::identity(n, n);
    let shifted_norm2 = |g: C64| spectral::spectral_norm(&(m - &eye * g)).map(|v| v * v);
    let coarse = |g: C64| Ok(shifted_norm2(g)? - coarse_c.sampled(g).powi(2));
    let fine = |g: C64| Ok(shifted_norm2(g)? - fine_c.refined(g, cfg)?.powi(2));
    let inf = infimum_search(&coarse, &fine, 3.0 * norm, side, cfg)?;
    let lhs = norm * norm - w * w;
    Ok(InequalityReport::new("norm-radius-gap", lhs, inf.value, cfg.decision_margin).with_trace(inf.trace))
}

/// `(1 − ‖T − ξI‖²/|ξ|²)‖T‖² ≤ w²(T) − c²(T*T − ξT*)/|ξ|²` for `ξ ≠ 0`.
pub fn scalar_shift_bound(t: &ComplexMatrix, xi: C64, cfg: &ToleranceConfig) -> Result<InequalityReport> {
    cfg.validate()?;
    if xi.norm() == 0.0 || !xi.is_finite() {
        return Err(Error::Invalid("shift must be a nonzero finite scalar".into()));
    }
    let m = t.as_matrix();
    let n = t.n();
    let norm = spectral::spectral_norm(m)?;
    let shifted = spectral::spectral_norm(&(m - DMatrix::<C64>::identity(n, n) * xi))?;
    let w = numerical_radius_raw(m, cfg)?.value;
    let ta = m.adjoint();
    let inner_op = &ta * m - &ta * xi;
    let c = crawford_raw(&inner_op, cfg, cfg.sweep_points, false)?.value;
    let x2 = xi.norm_sqr();
    let lhs = (1.0 - shifted * shifted / x2) * norm * norm;
    let rhs = w * w - c * c / x2;
    Ok(InequalityReport::new("scalar-shift", lhs, rhs, cfg.decision_margin))
}

/// `w²(T) − w(T²) ≤ inf_γ {(‖T − γT*‖²‖T‖² − c²(T² − γTT*)) / (‖T‖² + c²(T))}`.
pub fn square_radius_gap_bound(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<InequalityReport> {
    square_radius_gap_bound_on_grid(t, cfg, GAMMA_GRID_SIDE)
}

pub fn square_radius_gap_bound_on_grid(t: &ComplexMatrix, cfg: &ToleranceConfig, side: usize) -> Result<InequalityReport> {
    cfg.validate()?;
    check_grid_side(side)?;
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let m = t.as_matrix();
    let ta = m.adjoint();
    let norm = spectral::spectral_norm(m)?;
    let w = numerical_radius_raw(m, cfg)?.value;
    let sq = m * m;
    let w_sq = numerical_radius_raw(&sq, cfg)?.value;
    let c = crawford_raw(m, cfg, cfg.sweep_points, false)?.value;
    let gram = m * &ta;
    let denom = norm * norm + c * c;
    let objective = |g: C64, crawford: &dyn Fn(&DMatrix<C64>) -> Result<f64>| -> Result<f64> {
        let a = spectral::spectral_norm(&(m - &ta * g))?;
        let cc = crawford(&(&sq - &gram * g))?;
        Ok((a * a * norm * norm - cc * cc) / denom)
    };
    let coarse = |g: C64| objective(g, &|x| sampled_crawford(x, COARSE_ANGLES));
    let fine_points = (cfg.sweep_points / 4).max(COARSE_ANGLES);
    let fine = |g: C64| objective(g, &|x| Ok(crawford_raw(x, cfg, fine_points, false)?.value));
    let inf = infimum_search(&coarse, &fine, 3.0, side, cfg)?;
    let lhs = w * w - w_sq;
    Ok(InequalityReport::new("square-radius-gap", lhs, inf.value, cfg.decision_margin).with_trace(inf.trace))
}

fn check_grid_side(side: usize) -> Result<()> {
    if side < 3 {
        return Err(Error::Invalid(format!("grid side must be at least 3, got {side}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Verdict;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn e(n: usize, i: usize) -> ComplexVector {
        ComplexVector::basis(n, i)
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn gram_residual_examples() {
        assert!(gram_shift_residual(&e(2, 0), &e(2, 1), c(5.0, 2.0)).unwrap() < 1e-12);
        let zero = ComplexVector::new(vec![c(0.0, 0.0); 2]).unwrap();
        assert_eq!(gram_shift_residual(&e(2, 0), &zero, c(1.0, 1.0)).unwrap(), 0.0);
        assert!(real_gram_shift_residual(&e(2, 0), &e(2, 1), 3.0).unwrap() < 1e-12);
        assert_eq!(real_gram_shift_residual(&e(2, 0), &e(2, 0), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn best_approximation_examples() {
        let b = ComplexVector::new(vec![c(1.0, 2.0), c(-0.5, 0.0)]).unwrap();
        let a = b.scale(c(3.0, 0.0));
        let r = best_approximation_identity(&a, &b, &cfg()).unwrap();
        assert!(r.infimum < 1e-24);
        assert!(r.dependence.all_hold());
        assert!(r.identity.verdict.is_holds());

        let r = best_approximation_identity(&e(2, 0), &e(2, 1), &cfg()).unwrap();
        assert_eq!(r.gamma_star, c(0.0, 0.0));
        assert!((r.infimum - 1.0).abs() < 1e-15);
        assert!(r.dependence.all_fail());

        let zero = ComplexVector::new(vec![c(0.0, 0.0); 2]).unwrap();
        assert!(best_approximation_identity(&a, &zero, &cfg()).is_err());
    }

    #[test]
    fn buzano_examples() {
        let u = UnitVector::basis(2, 0);
        let r = buzano_check(&e(2, 0), &e(2, 0), &u, &cfg()).unwrap();
        assert_eq!((r.lhs, r.rhs), (2.0, 2.0));
        assert!(r.verdict.is_holds());
        let r = buzano_check(&e(2, 1), &e(2, 0), &u, &cfg()).unwrap();
        assert_eq!(r.lhs, 0.0);
        let loose = UnitVector::normalize(&ComplexVector::from_real(&[1.0, 0.0]).unwrap()).unwrap();
        assert!(buzano_check(&e(2, 0), &e(2, 0), &loose, &cfg()).is_ok());
        let bad = UnitVector::checked(ComplexVector::from_real(&[1.0, 0.0]).unwrap(), 1e-10).unwrap();
        let strict = ToleranceConfig { unit_tol: 1e-12, ..cfg() };
        assert!(buzano_check(&e(2, 0), &e(2, 0), &bad, &strict).is_ok());
    }

    #[test]
    fn chain_examples() {
        let r = norm_crawford_radius_check(&ComplexMatrix::identity(3), &cfg()).unwrap();
        assert!((r[0].lhs - 2.0).abs() < 1e-12 && (r[0].rhs - 4.0).abs() < 1e-12);
        assert!((r[1].rhs - 2.0).abs() < 1e-12);
        assert!(r.iter().all(|x| x.verdict.is_holds()));

        let r = norm_crawford_radius_check(&nilpotent(), &cfg()).unwrap();
        assert!((r[0].lhs - 1.0).abs() < 1e-12 && (r[0].rhs - 1.0).abs() < 1e-12);
        assert!(r.iter().all(|x| x.verdict.is_holds()), "{r:?}");
    }

    #[test]
    fn gap_bound_examples() {
        let d = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, -1.0)]).unwrap();
        let r = norm_radius_gap_bound(&d, &cfg()).unwrap();
        assert!(r.lhs.abs() < 1e-10);
        assert_eq!(r.verdict, Verdict::Holds);

        let r = norm_radius_gap_bound(&nilpotent(), &cfg()).unwrap();
        assert!((r.lhs - 0.75).abs() < 1e-10);
        assert!(r.rhs <= 1.0 + 1e-9);
        assert!(r.slack > 0.0);
    }

    #[test]
    fn scalar_shift_examples() {
        let r = scalar_shift_bound(&ComplexMatrix::identity(2), c(1.0, 0.0), &cfg()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert!(r.verdict.is_holds());
        let r = scalar_shift_bound(&nilpotent(), c(1.0, 0.0), &cfg()).unwrap();
        assert!(r.slack > 0.0);
        assert!(scalar_shift_bound(&nilpotent(), c(0.0, 0.0), &cfg()).is_err());
    }

    #[test]
    fn square_gap_examples() {
        let d = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let r = square_radius_gap_bound(&d, &cfg()).unwrap();
        assert!(r.lhs.abs() < 1e-10);
        assert!(r.verdict.is_holds());
        let r = square_radius_gap_bound(&nilpotent(), &cfg()).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-10);
        assert!(r.rhs >= 0.25 - 1e-6, "{r:?}");
        assert!(square_radius_gap_bound(&ComplexMatrix::zeros(2), &cfg()).is_err());
    }

    #[test]
    fn nested_grids_never_raise_the_grid_minimum() {
        let t = ComplexMatrix::from_rows(&[vec![c(0.3, 1.0), c(1.0, 0.0)], vec![c(-0.4, 0.2), c(0.0, -0.7)]]).unwrap();
        let sc = ShiftedCrawford::new(t.as_matrix(), 64).unwrap();
        let f = |g: C64| Ok(spectral::spectral_norm(&(t.as_matrix() - DMatrix::<C64>::identity(2, 2) * g))?.powi(2) - sc.sampled(g).powi(2));
        let (_, v41) = grid_min(&f, &disk_grid(3.0, 41)).unwrap();
        let (_, v81) = grid_min(&f, &disk_grid(3.0, 81)).unwrap();
        assert!(v81 <= v41);
    }
}
