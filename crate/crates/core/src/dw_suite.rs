//! Equivalence batteries tying norm-parallelism to the identity with the
//! Davis–Wielandt radius, and the truncated shift table.

use serde::Serialize;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::operator::{inner, norming_basis, op_norm, rank_one, ComplexMatrix, ComplexVector, UnitVector, C64};
use crate::ortho::is_parallel;
use crate::radii::{davis_wielandt_raw, numerical_radius_raw};
use crate::spectral;
use crate::verdict::{Condition, EquivalenceBattery, InequalityReport};

/// Radii shared by every battery.
struct Radii {
    norm: f64,
    w: f64,
    dw: f64,
}

impl Radii {
    fn of(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            norm: op_norm(t)?.value,
            w: numerical_radius_raw(t.as_matrix(), cfg)?.value,
            dw: davis_wielandt_raw(t.as_matrix(), cfg)?.value,
        })
    }

    /// `dw(T) = √(w²(T) + ‖T‖⁴)`; the right side is always an upper bound.
    fn dw_equality(&self, label: &str, cfg: &ToleranceConfig) -> Condition {
        let rhs = (self.w * self.w + self.norm.powi(4)).sqrt();
        Condition::new(label, self.dw, rhs, self.dw - rhs, cfg.threshold(rhs))
    }
}

/// `T ∥ I` against `dw(T) = √(w²(T) + ‖T‖⁴)`.
pub fn identity_parallel_battery(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceBattery> {
    let r = Radii::of(t, cfg)?;
    let par = is_parallel(t, &ComplexMatrix::identity(t.n()), cfg)?;
    let a = Condition::from_certificate("a", r.w, r.norm, &par);
    let b = r.dw_equality("b", cfg);
    let mut battery = EquivalenceBattery::new("identity-parallel", vec![a, b]);
    battery.witness = par.witness;
    Ok(battery)
}

/// Four equivalent ways for the numerical radius to reach the norm:
/// `i` the Davis–Wielandt equality, `ii` `w(T) = ‖T‖`,
/// `iii` `dw(T) = ‖T‖√(1 + ‖T‖²)` and `iv` `T*T ≤ w²(T)I`.
pub fn norm_attainment_battery(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceBattery> {
    let r = Radii::of(t, cfg)?;
    let top = spectral::eigh(&(t.as_matrix().adjoint() * t.as_matrix()))?.max();
    let cap = r.norm * (1.0 + r.norm * r.norm).sqrt();
    let conditions = vec![
        r.dw_equality("i", cfg),
        Condition::new("ii", r.w, r.norm, r.w - r.norm, cfg.threshold(r.norm)),
        Condition::new("iii", r.dw, cap, r.dw - cap, cfg.threshold(cap)),
        Condition::new("iv", top, r.w * r.w, r.w * r.w - top, cfg.threshold(top)),
    ];
    Ok(EquivalenceBattery::new("norm-attainment", conditions))
}

/// Radii of powers against the Davis–Wielandt equality, together with the
/// parallelism pairs `T ∥ I`, `T ∥ T*` and `T*T ∥ T*`.
pub fn power_radius_battery(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceBattery> {
    let r = Radii::of(t, cfg)?;
    let m = t.as_matrix();
    let ta = t.adjoint();
    let sq = m * m;
    let cube = m * ta.as_matrix() * m;
    let w_sq = numerical_radius_raw(&sq, cfg)?.value;
    let w_cube = numerical_radius_raw(&cube, cfg)?.value;
    let n2 = r.norm.powi(2);
    let n3 = r.norm.powi(3);
    let gram = ComplexMatrix::from_na(ta.as_matrix() * m);
    let p_id = is_parallel(t, &ComplexMatrix::identity(t.n()), cfg)?;
    let p_adj = is_parallel(t, &ta, cfg)?;
    let p_gram = is_parallel(&gram, &ta, cfg)?;
    let conditions = vec![
        r.dw_equality("i", cfg),
        Condition::new("ii", w_sq, n2, w_sq - n2, cfg.threshold(n2)),
        Condition::new("iii", w_cube, n3, w_cube - n3, cfg.threshold(n3)),
        Condition::from_certificate("parallel-identity", r.w, r.norm, &p_id),
        Condition::from_certificate("parallel-adjoint", w_sq, n2, &p_adj),
        Condition::from_certificate("parallel-gram-adjoint", w_cube, n3, &p_gram),
    ];
    Ok(EquivalenceBattery::new("power-radius", conditions))
}

/// Rank-one `x ⊗ y`: `a` the Davis–Wielandt equality, `b` linear dependence
/// of `x` and `y`. The side check compares `w(x ⊗ y)` to
/// `(|⟨x,y⟩| + ‖x‖‖y‖)/2`.
pub fn rank_one_battery(x: &ComplexVector, y: &ComplexVector, cfg: &ToleranceConfig) -> Result<EquivalenceBattery> {
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroVector);
    }
    let t = rank_one(x, y)?;
    let r = Radii::of(&t, cfg)?;
    let (nx, ny) = (x.norm(), y.norm());
    let overlap = inner(x.as_vector(), y.as_vector()).norm();
    let ratio = overlap / (nx * ny);
    let closed = 0.5 * (overlap + nx * ny);
    let conditions = vec![
        r.dw_equality("a", cfg),
        Condition::new("b", ratio, 1.0, ratio - 1.0, cfg.decision_margin),
    ];
    let mut battery = EquivalenceBattery::new("rank-one", conditions);
    battery
        .side_checks
        .push(InequalityReport::equality("rank-one-radius", r.w, closed, cfg.decision_margin));
    Ok(battery)
}

/// Attainment of the numerical radius at a norming vector: `i` the
/// Davis–Wielandt equality, `ii` some unit `x` has `|⟨Tx,x⟩| = ‖T‖`, `iii`
/// some `x` in the norming set makes `Tx + γx` and `x` dependent for every γ.
///
/// The candidate for `iii` maximizes `|⟨Tx,x⟩|` over the norming set; its
/// Cauchy–Schwarz defect, divided by `2‖T‖`, is measured on a γ grid.
pub fn attained_radius_battery(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceBattery> {
    let r = Radii::of(t, cfg)?;
    let thr = cfg.threshold(r.norm);
    let w = numerical_radius_raw(t.as_matrix(), cfg)?;
    let ii = Condition::new("ii", w.attained, r.norm, w.attained - r.norm, thr);

    let (iii, witness) = if r.norm == 0.0 {
        (Condition::new("iii", 0.0, 0.0, 0.0, 0.0), None)
    } else {
        let basis = norming_basis(t, cfg)?;
        let m = basis.v.adjoint() * t.as_matrix() * &basis.v;
        let y = numerical_radius_raw(&m, cfg)?.witness;
        let x = basis.lift(y.as_vector());
        let tx = t.as_matrix() * &x;
        let nx2 = x.norm_squared();
        let radius = 2.0 * r.norm;
        let h = radius / 2f64.sqrt();
        let mut defect: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let g = C64::new(h * (i as f64 / 2.0 - 1.0), h * (j as f64 / 2.0 - 1.0));
                let v = &tx + &x * g;
                defect = defect.max(v.norm_squared() * nx2 - inner(&v, &x).norm_sqr());
            }
        }
        let margin = -defect / (2.0 * r.norm);
        (Condition::new("iii", defect, 0.0, margin, thr), Some(UnitVector::from_na(x)))
    };
    let mut battery = EquivalenceBattery::new("attained-radius", vec![r.dw_equality("i", cfg), ii, iii]);
    battery.witness = witness;
    Ok(battery)
}

/// One row of the truncated shift table.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftRow {
    pub n: usize,
    pub norm: f64,
    pub w: f64,
    pub dw: f64,
    /// `√2 − dw(Sₙ)`.
    pub gap: f64,
    /// `w(Sₙ) < 1`: the norm is not attained by the numerical radius.
    pub below_one: bool,
}

/// Norm, numerical radius and Davis–Wielandt radius of the `n × n` shift
/// truncations for each requested size.
pub fn shift_truncation_table(sizes: &[usize], cfg: &ToleranceConfig) -> Result<Vec<ShiftRow>> {
    cfg.validate()?;
    if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
        return Err(Error::Invalid(format!("shift truncation needs n >= 2, got {n}")));
    }
    sizes
        .iter()
        .map(|&n| {
            let s = ComplexMatrix::shift_truncation(n)?;
            let norm = op_norm(&s)?.value;
            let w = numerical_radius_raw(s.as_matrix(), cfg)?.value;
            let dw = davis_wielandt_raw(s.as_matrix(), cfg)?.value;
            Ok(ShiftRow {
                n,
                norm,
                w,
                dw,
                gap: std::f64::consts::SQRT_2 - dw,
                below_one: w < 1.0,
            })
        })
        .collect()
}
