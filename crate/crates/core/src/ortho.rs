//! Birkhoff–James orthogonality, r-orthogonality and norm-parallelism, each
//! decided with a witness, and verifiers for the vector-level
//! characterizations of each relation.
//!
//! All three deciders reduce to the compression `M = V*(S*T)V` onto the
//! norming subspace of `T`, because `⟨Tx, Sx⟩ = ⟨(S*T)x, x⟩` and the norming
//! set is the unit sphere of `range(V)`.

use nalgebra::DMatrix;

use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::identities::real_gram_shift_residual;
use crate::operator::{check_dim, inner, norming_basis, ComplexMatrix, ComplexVector, Unimodular, UnitVector, C64};
use crate::radii::{crawford_raw, numerical_radius_raw};
use crate::range::membership;
use crate::rng::GaussianStream;
use crate::spectral;
use crate::verdict::{Condition, DecisionCertificate, EquivalenceBattery, InequalityReport, Verdict};

/// `V*(S*T)V` with `V` an orthonormal basis of the norming subspace of `T`.
pub fn compressed_form(t: &ComplexMatrix, s: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    check_dim(t.n(), s.n())?;
    let basis = norming_basis(t, cfg)?;
    Ok(ComplexMatrix::from_na(compress(&basis.v, t, s)))
}

fn compress(v: &DMatrix<C64>, t: &ComplexMatrix, s: &ComplexMatrix) -> DMatrix<C64> {
    let st = s.as_matrix().adjoint() * t.as_matrix();
    v.adjoint() * st * v
}

fn pair_scale(t: &ComplexMatrix, s: &ComplexMatrix) -> Result<(f64, f64)> {
    Ok((
        spectral::spectral_norm(t.as_matrix())?,
        spectral::spectral_norm(s.as_matrix())?,
    ))
}

/// Decides `z ∈ W(M)`. The margin is the depth of `z` inside `W(M)`, or
/// minus its distance when outside.
pub fn in_numerical_range(m: &ComplexMatrix, z: C64, cfg: &ToleranceConfig) -> Result<DecisionCertificate> {
    cfg.validate()?;
    let scale = m.frobenius_norm().max(z.norm());
    membership_certificate(m.as_matrix(), z, cfg, scale)
}

fn membership_certificate(m: &DMatrix<C64>, z: C64, cfg: &ToleranceConfig, scale: f64) -> Result<DecisionCertificate> {
    let r = membership(m, z, cfg)?;
    let verdict = Verdict::classify(r.margin, cfg.threshold(scale));
    let witness = (verdict != Verdict::Fails).then(|| UnitVector::from_na(r.witness));
    Ok(DecisionCertificate {
        verdict,
        margin: r.margin,
        witness,
        unimodular: None,
        notes: format!("witness residual {:.3e}", r.residual),
    })
}

/// `T ⊥_B S`: some `x` in the norming set of `T` has `⟨Tx, Sx⟩ = 0`.
///
/// The notes carry a cross-check of `min ‖T + γS‖ − ‖T‖` over a coarse grid
/// of `|γ| ≤ 2‖T‖/‖S‖`; outside that disk `‖T + γS‖ ≥ |γ|‖S‖ − ‖T‖ > ‖T‖`.
pub fn is_bj_orthogonal(t: &ComplexMatrix, s: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<DecisionCertificate> {
    cfg.validate()?;
    check_dim(t.n(), s.n())?;
    let basis = norming_basis(t, cfg)?;
    let (nt, ns) = pair_scale(t, s)?;
    let m = compress(&basis.v, t, s);
    let mut cert = membership_certificate(&m, C64::new(0.0, 0.0), cfg, nt * ns)?;
    cert.witness = cert.witness.map(|y| UnitVector::from_na(basis.lift(y.as_vector())));
    let grid_gap = bj_grid_gap(t, s, nt, ns, 11)?;
    cert.notes = format!(
        "{}; norming dimension {}; grid min of ||T+gS||-||T|| = {:.3e}",
        cert.notes,
        basis.dim(),
        grid_gap
    );
    Ok(cert)
}

fn bj_grid_gap(t: &ComplexMatrix, s: &ComplexMatrix, nt: f64, ns: f64, side: usize) -> Result<f64> {
    if ns == 0.0 {
        return Ok(0.0);
    }
    let radius = 2.0 * nt / ns;
    let mut gap = f64::INFINITY;
    for i in 0..side {
        for j in 0..side {
            let g = C64::new(
                radius * (2.0 * i as f64 / (side - 1) as f64 - 1.0),
                radius * (2.0 * j as f64 / (side - 1) as f64 - 1.0),
            );
            if g.norm() > radius {
                continue;
            }
            let v = spectral::spectral_norm(&(t.as_matrix() + s.as_matrix() * g))? - nt;
            gap = gap.min(v);
        }
    }
    Ok(gap)
}

/// `T ⊥ʳ_B S`: some `x` in the norming set of `T` has `Re⟨Tx, Sx⟩ = 0`.
///
/// With `H` the Hermitian part of the compression this asks for
/// `λ_min(H) ≤ 0 ≤ λ_max(H)`. The witness always minimizes
/// `|Re⟨Tx, Sx⟩|` over the norming set.
pub fn is_r_orthogonal(t: &ComplexMatrix, s: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<DecisionCertificate> {
    cfg.validate()?;
    check_dim(t.n(), s.n())?;
    let basis = norming_basis(t, cfg)?;
    let (nt, ns) = pair_scale(t, s)?;
    let m = compress(&basis.v, t, s);
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let e = spectral::eigh(&h)?;
    let (lo, hi) = (e.min(), e.max());
    let margin = (-lo).min(hi);
    let y = if lo > 0.0 {
        e.bottom_vector()
    } else if hi < 0.0 {
        e.top_vector()
    } else {
        let y = e.bottom_vector() * C64::new(hi.sqrt(), 0.0) + e.top_vector() * C64::new((-lo).sqrt(), 0.0);
        if y.norm() > 0.0 {
            y
        } else {
            e.bottom_vector()
        }
    };
    let x = basis.lift(&y.normalize());
    let residual = inner(&(t.as_matrix() * &x), &(s.as_matrix() * &x)).re;
    Ok(DecisionCertificate {
        verdict: Verdict::classify(margin, cfg.threshold(nt * ns)),
        margin,
        witness: Some(UnitVector::from_na(x)),
        unimodular: None,
        notes: format!(
            "Hermitian part spectrum [{lo:.6e}, {hi:.6e}]; Re<Tx,Sx> at witness {residual:.3e}"
        ),
    })
}

/// `T ∥ S`: `‖T + λS‖ = ‖T‖ + ‖S‖` for some unimodular `λ`; in finite
/// dimensions, `w(S*T) = ‖T‖‖S‖`.
///
/// The margin is `w(S*T) − ‖T‖‖S‖`. The unimodular factor is the phase of
/// `⟨Tx, Sx⟩` at the radius witness, which aligns `Sx` with `Tx`.
pub fn is_parallel(t: &ComplexMatrix, s: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<DecisionCertificate> {
    cfg.validate()?;
    check_dim(t.n(), s.n())?;
    let (nt, ns) = pair_scale(t, s)?;
    if nt == 0.0 || ns == 0.0 {
        return Ok(DecisionCertificate {
            verdict: Verdict::Holds,
            margin: 0.0,
            witness: None,
            unimodular: Some(Unimodular::from_phase(0.0)),
            notes: "zero operator is parallel to everything".into(),
        });
    }
    let st = s.as_matrix().adjoint() * t.as_matrix();
    let w = numerical_radius_raw(&st, cfg)?;
    let margin = w.value - nt * ns;
    let x = w.witness.as_vector();
    let pairing = inner(&(t.as_matrix() * x), &(s.as_matrix() * x));
    let lambda = Unimodular::phase_of(pairing).unwrap_or_else(|| Unimodular::from_phase(0.0));
    let combined = spectral::spectral_norm(&(t.as_matrix() + s.as_matrix() * lambda.value()))?;
    Ok(DecisionCertificate {
        verdict: Verdict::classify(margin, cfg.threshold(nt * ns)),
        margin,
        witness: Some(w.witness.clone()),
        unimodular: Some(lambda),
        notes: format!(
            "||T+lS|| = {combined:.16e}, ||T||+||S|| = {:.16e}",
            nt + ns
        ),
    })
}

/// Orthonormal basis of the intersection of the norming subspaces of `T`
/// and `S`, from principal vectors whose cosine exceeds `1 − subspace_tol`.
/// Also returns the largest principal cosine.
pub(crate) fn norming_intersection(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<(Option<DMatrix<C64>>, f64)> {
    let vt = norming_basis(t, cfg)?.v;
    let vs = norming_basis(s, cfg)?.v;
    let cross = vt.adjoint() * &vs;
    let dec = spectral::svd(&cross)?;
    let top = dec.values.first().copied().unwrap_or(0.0);
    let k = dec.values.iter().take_while(|&&c| c > 1.0 - cfg.subspace_tol).count();
    if k == 0 {
        return Ok((None, top));
    }
    let q = &vt * dec.u.columns(0, k);
    // Re-orthonormalize to absorb the slack in the cosines.
    let q = q.qr().q();
    Ok((Some(q.columns(0, k).into_owned()), top))
}

/// Radius of the γ grids, beyond which `‖T + γS‖ > ‖T‖`.
fn gamma_radius(nt: f64, ns: f64) -> f64 {
    if ns > 0.0 {
        2.0 * nt / ns
    } else {
        1.0
    }
}

/// 25 complex γ: a 5×5 square grid inscribed in the disk of radius `r`.
fn complex_gamma_grid(r: f64) -> Vec<C64> {
    let h = r / 2f64.sqrt();
    let mut out = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            out.push(C64::new(h * (i as f64 / 2.0 - 1.0), h * (j as f64 / 2.0 - 1.0)));
        }
    }
    out
}

/// 25 real γ evenly spaced on `[−r, r]`.
fn real_gamma_grid(r: f64) -> Vec<f64> {
    (0..25).map(|i| r * (i as f64 / 12.0 - 1.0)).collect()
}

/// Parallelism against its vector characterization: some `x` in both norming
/// sets makes `Tx + γSx` and `Sx` linearly dependent for every γ.
///
/// Conditions: `a` is the parallelism decision; `b` takes the best candidate
/// in the intersection of the norming subspaces and measures the
/// Cauchy–Schwarz defect `‖Tx+γSx‖²‖Sx‖² − |⟨Tx+γSx, Sx⟩|²` over a γ grid,
/// divided by `2‖T‖‖S‖` so that it shares units with `a`.
pub fn parallel_dependence_equivalence(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceBattery> {
    cfg.validate()?;
    check_dim(t.n(), s.n())?;
    let (nt, ns) = pair_scale(t, s)?;
    let thr = cfg.threshold(nt * ns);
    let par = is_parallel(t, s, cfg)?;
    let a = Condition::from_certificate("a", 0.0, 0.0, &par);
    let a = Condition { lhs: par.margin + nt * ns, rhs: nt * ns, ..a };

    let (basis, cos_max) = norming_intersection(t, s, cfg)?;
    let (b, witness, details) = match basis {
        None => {
            let margin = -(1.0 - cos_max) * nt * ns;
            (
                Condition::new("b", 1.0 - cos_max, 0.0, margin, thr),
                None,
                format!("norming intersection empty; largest principal cosine {cos_max:.16e}"),
            )
        }
        Some(q) => {
            let st = s.as_matrix().adjoint() * t.as_matrix();
            let m = q.adjoint() * st * &q;
            let y = numerical_radius_raw(&m, cfg)?.witness;
            let x = &q * y.as_vector();
            let tx = t.as_matrix() * &x;
            let sx = s.as_matrix() * &x;
            let nb2 = sx.norm_squared();
            let mut defect: f64 = 0.0;
            for g in complex_gamma_grid(gamma_radius(nt, ns)) {
                let v = &tx + &sx * g;
                let d = v.norm_squared() * nb2 - inner(&v, &sx).norm_sqr();
                defect = defect.max(d);
            }
            let margin = -defect / (2.0 * nt * ns);
            (
                Condition::new("b", defect, 0.0, margin, thr),
                Some(UnitVector::from_na(x)),
                format!("norming intersection dimension {}", q.ncols()),
            )
        }
    };
    let mut battery = EquivalenceBattery::new("parallel-dependence", vec![a, b]).with_details(details);
    battery.witness = witness;
    Ok(battery)
}

/// Birkhoff–James orthogonality against the Pythagorean characterization:
/// some `x` in the norming set of `T` has
/// `‖Tx + γSx‖² = ‖Tx‖² + |γ|²‖Sx‖²` for every complex γ.
///
/// The candidate minimizes `|⟨Tx, Sx⟩|` over the norming set. The margin of
/// `b` is minus the largest `|‖Tx+γSx‖² − ‖Tx‖² − |γ|²‖Sx‖²| / 2|γ|` on the
/// grid, which is at most `|⟨Tx, Sx⟩|`.
pub fn bj_pythagoras_equivalence(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceBattery> {
    cfg.validate()?;
    check_dim(t.n(), s.n())?;
    let (nt, ns) = pair_scale(t, s)?;
    let thr = cfg.threshold(nt * ns);
    let bj = is_bj_orthogonal(t, s, cfg)?;
    let a = Condition::from_certificate("a", -bj.margin.min(0.0), 0.0, &bj);

    let basis = norming_basis(t, cfg)?;
    let m = compress(&basis.v, t, s);
    let y = crawford_raw(&m, cfg, cfg.sweep_points, true)?.witness;
    let x = basis.lift(y.as_vector());
    let tx = t.as_matrix() * &x;
    let sx = s.as_matrix() * &x;
    let (na2, nb2) = (tx.norm_squared(), sx.norm_squared());
    let mut worst: f64 = 0.0;
    for g in complex_gamma_grid(gamma_radius(nt, ns)) {
        if g.norm() == 0.0 {
            continue;
        }
        let lhs = (&tx + &sx * g).norm_squared();
        let res = lhs - na2 - g.norm_sqr() * nb2;
        worst = worst.max(res.abs() / (2.0 * g.norm()));
    }
    let b = Condition::new("b", worst, 0.0, -worst, thr);
    let mut battery = EquivalenceBattery::new("bj-pythagoras", vec![a, b])
        .with_details(format!("norming dimension {}", basis.dim()));
    battery.witness = Some(UnitVector::from_na(x));
    Ok(battery)
}

/// r-orthogonality against the real-γ Pythagorean characterization, with
/// the real-γ Gram identity spot-checked on seeded random vectors.
pub fn r_pythagoras_equivalence(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceBattery> {
    cfg.validate()?;
    check_dim(t.n(), s.n())?;
    let (nt, ns) = pair_scale(t, s)?;
    let thr = cfg.threshold(nt * ns);
    let r = is_r_orthogonal(t, s, cfg)?;
    let a = Condition::from_certificate("a", -r.margin.min(0.0), 0.0, &r);

    let x = r.witness.clone().expect("r-orthogonality always returns a witness");
    let tx = t.as_matrix() * x.as_vector();
    let sx = s.as_matrix() * x.as_vector();
    let (na2, nb2) = (tx.norm_squared(), sx.norm_squared());
    let mut worst: f64 = 0.0;
    for g in real_gamma_grid(gamma_radius(nt, ns)) {
        if g == 0.0 {
            continue;
        }
        let lhs = (&tx + &sx * C64::new(g, 0.0)).norm_squared();
        let res = lhs - na2 - g * g * nb2;
        worst = worst.max(res.abs() / (2.0 * g.abs()));
    }
    let b = Condition::new("b", worst, 0.0, -worst, thr);

    let mut rng = GaussianStream::new(cfg.rng_seed, 0x7265_616c);
    let mut rel: f64 = 0.0;
    for _ in 0..cfg.oracle_samples {
        let av = ComplexVector::from_na(rng.complex_vector(t.n()));
        let bv = ComplexVector::from_na(rng.complex_vector(t.n()));
        let g = 4.0 * rng.normal();
        let scale = (av.norm() + g.abs() * bv.norm()).powi(2) * bv.norm().powi(2);
        rel = rel.max(real_gram_shift_residual(&av, &bv, g)? / scale.max(f64::MIN_POSITIVE));
    }
    let mut battery = EquivalenceBattery::new("r-pythagoras", vec![a, b]);
    battery.side_checks.push(InequalityReport::new(
        "real-gram-identity",
        rel,
        1e-10,
        cfg.decision_margin,
    ));
    battery.witness = Some(x);
    Ok(battery)
}
