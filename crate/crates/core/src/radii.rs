//! Numerical radius, Crawford number and Davis–Wielandt radius, plus the
//! standard inequalities tying them to the operator norm.

use nalgebra::DMatrix;

use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::joint::{maximize_joint, ShellRadius};
use crate::operator::{op_norm, rayleigh_raw, ComplexMatrix, RadiusResult, UnitVector, C64};
use crate::range::{self, refine_circle_max, rotated_eig, rotated_eigs, sweep_angles, BoundaryPoint};
use crate::spectral;
use crate::verdict::InequalityReport;

/// `w(T) = max_θ λ_max(Re(e^{iθ}T))`.
pub fn numerical_radius(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<RadiusResult> {
    cfg.validate()?;
    numerical_radius_raw(t.as_matrix(), cfg)
}

pub(crate) fn numerical_radius_raw(t: &DMatrix<C64>, cfg: &ToleranceConfig) -> Result<RadiusResult> {
    let norm = spectral::spectral_norm(t)?;
    let angles = sweep_angles(cfg.sweep_points);
    let eigs = rotated_eigs(t, &angles)?;
    let values: Vec<f64> = eigs.iter().map(|e| e.max()).collect();
    let f = |theta: f64| rotated_eig(t, theta).map(|e| e.max());
    let opt = refine_circle_max(&values, &f, norm, cfg.refine_tol)?;
    let witness = UnitVector::from_na(rotated_eig(t, opt.theta)?.top_vector());
    let attained = rayleigh_raw(t, witness.as_vector()).norm();
    let value = opt.value.max(attained).max(0.0);
    let upper = norm.min(opt.sweep_best + norm * opt.step).max(value);
    Ok(RadiusResult {
        value,
        lower: attained.min(value),
        upper,
        attained,
        witness,
        sweep_resolution: opt.step,
    })
}

/// `c(T)`, the distance from the origin to `W(T)`, or 0 when `0 ∈ W(T)`.
pub fn crawford_number(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<RadiusResult> {
    cfg.validate()?;
    crawford_raw(t.as_matrix(), cfg, cfg.sweep_points, true)
}

/// Crawford number from `points` sweep angles, optionally without a witness.
pub(crate) fn crawford_raw(
    t: &DMatrix<C64>,
    cfg: &ToleranceConfig,
    points: usize,
    with_witness: bool,
) -> Result<RadiusResult> {
    let n = t.nrows();
    let lipschitz = t.norm();
    let angles = sweep_angles(points);
    let eigs = rotated_eigs(t, &angles)?;
    let values: Vec<f64> = eigs.iter().map(|e| e.min()).collect();
    let step = angles.get(1).copied().unwrap_or(0.0);
    let sweep_best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    // The bottom of the spectrum is concave in θ wherever it is positive, so
    // a sweep that stays below −L·Δθ everywhere proves 0 ∈ W(T).
    let (theta, gmax) = if sweep_best < -lipschitz * step {
        (0.0, sweep_best)
    } else {
        let f = |theta: f64| rotated_eig(t, theta).map(|e| e.min());
        let opt = refine_circle_max(&values, &f, lipschitz, cfg.refine_tol)?;
        (opt.theta, opt.value)
    };
    let value = gmax.max(0.0);
    if !with_witness {
        return Ok(RadiusResult {
            value,
            lower: value,
            upper: value,
            attained: value,
            witness: UnitVector::basis(n, 0),
            sweep_resolution: step,
        });
    }

    let boundary_for = |shift: C64| -> Vec<BoundaryPoint> {
        let a = t - DMatrix::<C64>::identity(n, n) * shift;
        angles
            .iter()
            .zip(&eigs)
            .map(|(&th, e)| BoundaryPoint::new(&a, th, e.top_vector()))
            .collect()
    };
    let witness = if value > 0.0 {
        let nearest = C64::from_polar(value, -theta);
        let direct = rotated_eig(t, theta)?.bottom_vector();
        let miss = (rayleigh_raw(t, &direct) - nearest).norm();
        if miss <= cfg.refine_tol * value.max(1.0) {
            direct
        } else {
            // Flat stretch of the boundary: walk along it to the nearest point.
            let a = t - DMatrix::<C64>::identity(n, n) * nearest;
            let built = range::point_witness(&a, boundary_for(nearest), cfg.refine_tol)?;
            if rayleigh_raw(&a, &built).norm() < miss {
                built
            } else {
                direct
            }
        }
    } else {
        range::point_witness(t, boundary_for(C64::new(0.0, 0.0)), cfg.refine_tol)?
    };
    let witness = UnitVector::from_na(witness);
    let attained = rayleigh_raw(t, witness.as_vector()).norm();
    Ok(RadiusResult {
        value,
        lower: value,
        upper: attained.max(value),
        attained,
        witness,
        sweep_resolution: step,
    })
}

/// `dw(T) = max √(|⟨Tx,x⟩|² + ‖Tx‖⁴)` over unit `x`.
///
/// The value is the best attained point; the upper bound is `√(w² + ‖T‖⁴)`.
pub fn davis_wielandt_radius(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<RadiusResult> {
    cfg.validate()?;
    davis_wielandt_raw(t.as_matrix(), cfg)
}

pub(crate) fn davis_wielandt_raw(t: &DMatrix<C64>, cfg: &ToleranceConfig) -> Result<RadiusResult> {
    let tm = ComplexMatrix::from_na(t.clone());
    let norm = op_norm(&tm)?;
    let w = numerical_radius_raw(t, cfg)?;
    let starts = [norm.witness.as_vector().clone(), w.witness.as_vector().clone()];
    let best = maximize_joint(t, &ShellRadius, &starts, cfg)?;
    let witness = UnitVector::from_na(best.vector);
    let value = dw_at(t, witness.as_vector());
    let upper = (w.upper.powi(2) + norm.value.powi(4)).sqrt().max(value);
    Ok(RadiusResult {
        value,
        lower: value,
        upper,
        attained: value,
        witness,
        sweep_resolution: (std::f64::consts::TAU / cfg.sphere_directions as f64).sqrt(),
    })
}

/// `√(|⟨Tx,x⟩|² + ‖Tx‖⁴)` at a unit vector.
pub(crate) fn dw_at(t: &DMatrix<C64>, x: &nalgebra::DVector<C64>) -> f64 {
    let z = rayleigh_raw(t, x);
    let r = (t * x).norm_squared();
    (z.norm_sqr() + r * r).sqrt()
}

/// Checks the norm and radius inequalities for `t`, using `partner` for the
/// subadditivity-type bound on `dw(T + S)`.
pub fn check_radius_bounds(
    t: &ComplexMatrix,
    partner: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<Vec<InequalityReport>> {
    cfg.validate()?;
    crate::operator::check_dim(t.n(), partner.n())?;
    let dm = cfg.decision_margin;
    let norm = op_norm(t)?.value;
    let w = numerical_radius(t, cfg)?.value;
    let dw = davis_wielandt_radius(t, cfg)?.value;
    let mut out = vec![
        InequalityReport::new("half-norm<=w", 0.5 * norm, w, dm),
        InequalityReport::new("w<=norm", w, norm, dm),
        InequalityReport::new("max(w,norm^2)<=dw", w.max(norm * norm), dw, dm),
        InequalityReport::new("dw<=sqrt(w^2+norm^4)", dw, (w * w + norm.powi(4)).sqrt(), dm),
    ];
    for k in 2..=4u32 {
        let wk = numerical_radius(&t.powi(k), cfg)?.value;
        out.push(InequalityReport::new(format!("power-{k}"), wk, w.powi(k as i32), dm));
    }
    let phase = C64::from_polar(1.0, 0.7);
    for (label, modulus) in [("dw-scale-2", 2.0), ("dw-scale-1", 1.0), ("dw-scale-0.5", 0.5)] {
        let scaled = davis_wielandt_radius(&t.scale(phase * modulus), cfg)?.value;
        let plain = modulus * dw;
        let report = if modulus > 1.0 {
            InequalityReport::new(label, plain, scaled, dm)
        } else if modulus < 1.0 {
            InequalityReport::new(label, scaled, plain, dm)
        } else {
            InequalityReport::equality(label, scaled, plain, dm)
        };
        out.push(report);
    }
    let dws = davis_wielandt_radius(partner, cfg)?.value;
    let sum = davis_wielandt_radius(&(t + partner), cfg)?.value;
    let bound = (2.0 * (dw + dws) + 4.0 * (dw + dws).powi(2)).sqrt();
    out.push(InequalityReport::new("dw-sum", sum, bound, dm));
    Ok(out)
}
