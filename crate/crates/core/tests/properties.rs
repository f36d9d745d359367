mod common;

use nalgebra::DVector;
use opgeom::ensemble::{instance, instance_pair, EnsembleKind, EnsembleSpec, Pairing};
use opgeom::identities::{norm_radius_gap_bound_on_grid, square_radius_gap_bound_on_grid};
use opgeom::rng::GaussianStream;
use opgeom::{
    adjoint, crawford_number, davis_wielandt_radius, gram_shift_residual, identity_parallel_battery, in_numerical_range,
    is_bj_orthogonal, is_parallel, is_r_orthogonal, min_modulus, norm_attainment_battery, norm_radius_gap_bound,
    norming_basis, numerical_radius, op_norm, power_radius_battery, rank_one, rayleigh, real_gram_shift_residual,
    scalar_shift_bound, square_radius_gap_bound, ComplexMatrix, ComplexVector, Consistency, ToleranceConfig, Verdict,
    C64,
};
use proptest::prelude::*;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn draw(kind: EnsembleKind, n: usize, seed: u64) -> ComplexMatrix {
    instance(&EnsembleSpec::new(kind, n, 1, seed), 0).unwrap()
}

fn ginibre() -> impl Strategy<Value = ComplexMatrix> {
    (2usize..=4, any::<u64>()).prop_map(|(n, seed)| draw(EnsembleKind::Ginibre, n, seed))
}

fn small_cases() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn conjugate(t: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::new(u.as_matrix().adjoint() * t.as_matrix() * u.as_matrix()).unwrap()
}

proptest! {
    #![proptest_config(small_cases())]

    #[test]
    fn adjoint_is_an_involution(t in ginibre()) {
        prop_assert_eq!(adjoint(&adjoint(&t)), t);
    }

    #[test]
    fn norm_of_adjoint(t in ginibre()) {
        let a = op_norm(&t).unwrap().value;
        let b = op_norm(&adjoint(&t)).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn min_modulus_below_norm(t in ginibre(), seed in any::<u64>()) {
        prop_assert!(min_modulus(&t).unwrap().value <= op_norm(&t).unwrap().value);
        let u = draw(EnsembleKind::Unitary, t.n(), seed);
        let (m, n) = (min_modulus(&u).unwrap().value, op_norm(&u).unwrap().value);
        prop_assert!((m - n).abs() < 1e-10);
    }

    #[test]
    fn norming_combinations_attain_the_norm(n in 2usize..=4, seed in any::<u64>(), k in 1usize..=2) {
        // A unitary scaled on its first k columns has a k-dimensional norming subspace.
        let u = draw(EnsembleKind::Unitary, n, seed);
        let t = ComplexMatrix::from_fn(n, |r, c| u[(r, c)] * if c < k { 2.0 } else { 1.0 }).unwrap();
        let cfg = cfg();
        let basis = norming_basis(&t, &cfg).unwrap();
        prop_assert_eq!(basis.dim(), k);
        let mut rng = GaussianStream::new(seed, 1);
        let y = rng.unit_vector(k);
        let x = basis.lift(&y);
        let tx = (t.as_matrix() * &x).norm();
        let norm = op_norm(&t).unwrap().value;
        prop_assert!(tx >= norm * (1.0 - cfg.subspace_tol) && tx <= norm * (1.0 + 1e-12));
    }

    #[test]
    fn rank_one_action(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = GaussianStream::new(seed, 0);
        let mut vec = || ComplexVector::new(rng.complex_vector(n).iter().copied().collect()).unwrap();
        let (x, y, z) = (vec(), vec(), vec());
        let t = rank_one(&x, &y).unwrap();
        let tz = t.apply(&z).unwrap();
        let coef = common::dot(z.entries(), y.entries());
        for (got, xi) in tz.entries().iter().zip(x.entries()) {
            prop_assert!((got - coef * xi).norm() <= 1e-12 * (1.0 + (coef * xi).norm()));
        }
    }

    #[test]
    fn doubling_the_sweep_never_lowers_bounds(t in ginibre()) {
        let coarse = ToleranceConfig { sweep_points: 90, ..cfg() };
        let fine = ToleranceConfig { sweep_points: 180, ..cfg() };
        let tol = 1e-12 * op_norm(&t).unwrap().value.max(1.0);
        let (w1, w2) = (numerical_radius(&t, &coarse).unwrap(), numerical_radius(&t, &fine).unwrap());
        prop_assert!(w2.lower >= w1.lower - tol, "{} {}", w1.lower, w2.lower);
        let (c1, c2) = (crawford_number(&t, &coarse).unwrap(), crawford_number(&t, &fine).unwrap());
        prop_assert!(c2.lower >= c1.lower - tol, "{} {}", c1.lower, c2.lower);
    }

    #[test]
    fn witnesses_reproduce_values(t in ginibre()) {
        let cfg = cfg();
        let scale = op_norm(&t).unwrap().value.max(1.0);
        let w = numerical_radius(&t, &cfg).unwrap();
        let zw = rayleigh(&t, &w.witness).unwrap().norm();
        prop_assert!((zw - w.lower).abs() <= cfg.refine_tol * scale);
        let dw = davis_wielandt_radius(&t, &cfg).unwrap();
        let x = dw.witness.as_vector();
        let tx = (t.as_matrix() * x).norm_squared();
        let z = rayleigh(&t, &dw.witness).unwrap();
        let at = (z.norm_sqr() + tx * tx).sqrt();
        prop_assert!((at - dw.lower).abs() <= cfg.refine_tol * scale * scale);
        let c = crawford_number(&t, &cfg).unwrap();
        let zc = rayleigh(&t, &c.witness).unwrap().norm();
        prop_assert!((zc - c.lower).abs() <= 1e-9 * scale, "{zc} {}", c.lower);
    }

    #[test]
    fn radii_are_unitarily_invariant(t in ginibre(), seed in any::<u64>()) {
        let cfg = cfg();
        let u = draw(EnsembleKind::Unitary, t.n(), seed);
        let v = conjugate(&t, &u);
        let pairs = [
            (numerical_radius(&t, &cfg).unwrap().value, numerical_radius(&v, &cfg).unwrap().value),
            (crawford_number(&t, &cfg).unwrap().value, crawford_number(&v, &cfg).unwrap().value),
            (davis_wielandt_radius(&t, &cfg).unwrap().value, davis_wielandt_radius(&v, &cfg).unwrap().value),
        ];
        for (a, b) in pairs {
            prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn radii_are_phase_invariant(t in ginibre(), phi in 0.0..std::f64::consts::TAU) {
        let cfg = cfg();
        let r = t.scale(C64::from_polar(1.0, phi));
        prop_assert!((numerical_radius(&t, &cfg).unwrap().value - numerical_radius(&r, &cfg).unwrap().value).abs() < 1e-8);
        prop_assert!((davis_wielandt_radius(&t, &cfg).unwrap().value - davis_wielandt_radius(&r, &cfg).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn bj_verdict_is_scale_covariant(seed in any::<u64>(), orth in any::<bool>(), a in 0.2..5.0f64, b in 0.2..5.0f64, pa in 0.0..6.2f64) {
        let cfg = cfg();
        let pairing = if orth { Pairing::Orthogonal } else { Pairing::Independent };
        let (t, s) = instance_pair(&EnsembleSpec::new(EnsembleKind::Ginibre, 3, 1, seed), 0, pairing).unwrap();
        let base = is_bj_orthogonal(&t, &s, &cfg).unwrap().verdict;
        prop_assume!(base != Verdict::Marginal);
        let scaled = is_bj_orthogonal(&t.scale(C64::from_polar(a, pa)), &s.scale(C64::new(-b, 0.0)), &cfg).unwrap().verdict;
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn parallelism_is_symmetric(seed in any::<u64>(), par in any::<bool>()) {
        let cfg = cfg();
        let pairing = if par { Pairing::Parallel } else { Pairing::Independent };
        let (t, s) = instance_pair(&EnsembleSpec::new(EnsembleKind::Ginibre, 3, 1, seed), 0, pairing).unwrap();
        let ts = is_parallel(&t, &s, &cfg).unwrap();
        let st = is_parallel(&s, &t, &cfg).unwrap();
        prop_assume!(ts.verdict != Verdict::Marginal && st.verdict != Verdict::Marginal);
        prop_assert_eq!(ts.verdict, st.verdict);
    }

    #[test]
    fn parallel_witness_norms_both(seed in any::<u64>()) {
        let cfg = cfg();
        let (t, s) = instance_pair(&EnsembleSpec::new(EnsembleKind::Ginibre, 3, 1, seed), 0, Pairing::Parallel).unwrap();
        let cert = is_parallel(&t, &s, &cfg).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Holds);
        let x = cert.witness.unwrap();
        for m in [&t, &s] {
            let norm = op_norm(m).unwrap().value;
            let mx = (m.as_matrix() * x.as_vector()).norm();
            prop_assert!(mx * mx >= norm * norm * (1.0 - cfg.subspace_tol), "{mx} {norm}");
        }
    }

    #[test]
    fn bj_implies_r_orthogonality(seed in any::<u64>(), orth in any::<bool>()) {
        let cfg = cfg();
        let pairing = if orth { Pairing::Orthogonal } else { Pairing::Independent };
        let (t, s) = instance_pair(&EnsembleSpec::new(EnsembleKind::Ginibre, 3, 1, seed), 0, pairing).unwrap();
        if is_bj_orthogonal(&t, &s, &cfg).unwrap().verdict == Verdict::Holds {
            prop_assert_eq!(is_r_orthogonal(&t, &s, &cfg).unwrap().verdict, Verdict::Holds);
        }
    }

    #[test]
    fn membership_margin_is_lipschitz_in_resolution(t in ginibre(), re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let z = C64::new(re, im);
        let coarse = ToleranceConfig { sweep_points: 64, ..cfg() };
        let fine = ToleranceConfig { sweep_points: 128, ..cfg() };
        let m1 = in_numerical_range(&t, z, &coarse).unwrap().margin;
        let m2 = in_numerical_range(&t, z, &fine).unwrap().margin;
        let shifted = common::spectral_norm(&common::add_scaled(&common::dense(&t), C64::new(-1.0, 0.0), &common::dense(&ComplexMatrix::identity(t.n()).scale(z))));
        let dtheta = std::f64::consts::TAU / 64.0;
        prop_assert!(m2 - m1 <= shifted * dtheta + 1e-12, "{m1} -> {m2}");
    }

    #[test]
    fn identity_residuals_are_homogeneous(n in 2usize..=4, seed in any::<u64>(), alpha in 0.1..10.0f64) {
        let mut rng = GaussianStream::new(seed, 0);
        let a = ComplexVector::new(rng.complex_vector(n).iter().copied().collect()).unwrap();
        let b = ComplexVector::new(rng.complex_vector(n).iter().copied().collect()).unwrap();
        let g = rng.complex_normal();
        let bound = 1e-10 * (a.norm() + g.norm() * b.norm()).powi(2) * b.norm().powi(2);
        let (sa, sb) = (a.scale(C64::new(alpha, 0.0)), b.scale(C64::new(alpha, 0.0)));
        prop_assert!(gram_shift_residual(&sa, &sb, g).unwrap() <= alpha.powi(4) * bound);
        prop_assert!(real_gram_shift_residual(&sa, &sb, g.re).unwrap() <= alpha.powi(4) * bound);
    }

    #[test]
    fn refining_the_gamma_grid_never_raises_the_infimum(n in 2usize..=3, seed in any::<u64>()) {
        let cfg = cfg();
        let t = draw(EnsembleKind::Ginibre, n, seed);
        let tol = 1e-9 * op_norm(&t).unwrap().value.powi(2).max(1.0);
        let a = norm_radius_gap_bound_on_grid(&t, &cfg, 11).unwrap().rhs;
        let b = norm_radius_gap_bound_on_grid(&t, &cfg, 21).unwrap().rhs;
        prop_assert!(b <= a + tol, "{a} -> {b}");
        let a = square_radius_gap_bound_on_grid(&t, &cfg, 11).unwrap().rhs;
        let b = square_radius_gap_bound_on_grid(&t, &cfg, 21).unwrap().rhs;
        prop_assert!(b <= a + tol, "{a} -> {b}");
    }

    #[test]
    fn refinement_verdicts_never_fail(n in 2usize..=3, seed in any::<u64>(), re in -2.0..2.0f64, im in 0.1..2.0f64) {
        let cfg = cfg();
        let t = draw(EnsembleKind::Ginibre, n, seed);
        for r in [
            norm_radius_gap_bound(&t, &cfg).unwrap(),
            scalar_shift_bound(&t, C64::new(re, im), &cfg).unwrap(),
            square_radius_gap_bound(&t, &cfg).unwrap(),
        ] {
            prop_assert_ne!(r.verdict, Verdict::Fails, "{:?}", r);
        }
    }

    #[test]
    fn normal_operators_satisfy_every_condition(n in 2usize..=4, seed in any::<u64>()) {
        let cfg = cfg();
        let t = draw(EnsembleKind::Normal, n, seed);
        prop_assert!(identity_parallel_battery(&t, &cfg).unwrap().all_hold());
        prop_assert!(norm_attainment_battery(&t, &cfg).unwrap().all_hold());
    }

    #[test]
    fn square_zero_operators_fail_every_condition(n in 2usize..=4, seed in any::<u64>()) {
        let cfg = cfg();
        let t = draw(EnsembleKind::Nilpotent2, n, seed);
        prop_assert!(identity_parallel_battery(&t, &cfg).unwrap().all_fail());
        prop_assert!(norm_attainment_battery(&t, &cfg).unwrap().all_fail());
        prop_assert!(power_radius_battery(&t, &cfg).unwrap().all_fail());
    }

    #[test]
    fn batteries_never_disagree(t in ginibre()) {
        let cfg = cfg();
        prop_assert_ne!(identity_parallel_battery(&t, &cfg).unwrap().consistent, Consistency::Disagree);
        prop_assert_ne!(norm_attainment_battery(&t, &cfg).unwrap().consistent, Consistency::Disagree);
    }

    #[test]
    fn shift_shell_stays_under_radius_bound(n in 2usize..=12) {
        let cfg = cfg();
        let s = ComplexMatrix::shift_truncation(n).unwrap();
        let w = numerical_radius(&s, &cfg).unwrap().value;
        let dw = davis_wielandt_radius(&s, &cfg).unwrap().value;
        prop_assert!(dw <= (w * w + 1.0).sqrt() + 1e-12);
    }
}

#[test]
fn lifted_vectors_stay_unit() {
    let t = draw(EnsembleKind::Ginibre, 3, 5);
    let basis = norming_basis(&t, &cfg()).unwrap();
    let x = basis.lift(&DVector::from_element(basis.dim(), C64::new(1.0, 0.0)).normalize());
    assert!((x.norm() - 1.0).abs() < 1e-14);
}
