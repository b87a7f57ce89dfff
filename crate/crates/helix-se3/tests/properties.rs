mod common;

use common::*;
use helix_se3::conformation::{helix_energy, EnergyOptions};
use helix_se3::molecule::PairParams;
use helix_se3::se3::{ad_star_derivative_check, Vec3};
use helix_se3::{Conformation, Environment, LinearizationContext, Se3, SumRule};
use proptest::prelude::*;
use std::f64::consts::TAU;
use std::sync::OnceLock;

fn arr3(r: f64) -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-r..r)
}

fn arr6(r: f64) -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-r..r)
}

fn se3(r: f64) -> impl Strategy<Value = Se3> {
    (arr3(1.0), -3.0..3.0f64, arr3(r)).prop_map(|(a, t, p)| pose(a, t, p))
}

fn pair_params() -> impl Strategy<Value = PairParams> {
    (-3.0..3.0f64, 2.0..200.0f64, 0.8..1.2f64, 0.0..1e-3f64).prop_map(|(qq, lambda, d0, eps)| PairParams {
        qq,
        lambda,
        d0,
        eps,
    })
}

fn chain() -> &'static LinearizationContext {
    static CHAIN: OnceLock<LinearizationContext> = OnceLock::new();
    CHAIN.get_or_init(|| straight_dipole_chain(0.01, &SumRule::default()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms_hold(g in se3(3.0), h in se3(3.0), k in se3(3.0), x in arr6(2.0)) {
        prop_assert!(group_axioms(&g, &h, &k, &vector(x)) < 1e-13);
    }

    #[test]
    fn pairings_are_dual(g in se3(3.0), x in arr6(2.0), y in arr6(2.0), z in arr6(2.0), p in arr6(2.0)) {
        prop_assert!(dualities(&g, &vector(x), &vector(y), &vector(z), &covector(p)) < 1e-13);
    }

    #[test]
    fn exp_of_scaled_generators_composes(x in arr6(1.5), s in -1.0..1.0f64, t in -1.0..1.0f64) {
        let v = vector(x);
        let lhs = Se3::exp(&(v * s)).mul(&Se3::exp(&(v * t)));
        prop_assert!(lhs.distance(&Se3::exp(&(v * (s + t)))) < 1e-13);
    }

    #[test]
    fn coadjoint_curve_derivative(a0 in se3(2.0), a in arr6(1.0), alpha in arr6(1.0), xi in arr6(1.0)) {
        let r = ad_star_derivative_check(&a0, &vector(a), &covector(alpha), &covector(xi), 1e-5);
        prop_assert!(r < 1e-8, "residual {r:e}");
    }

    #[test]
    fn d1_is_the_gradient_of_the_pair_energy(
        xi in se3(5.0), ek in arr3(1.0), em in arr3(1.0), p in pair_params(), nu in arr6(1.0)
    ) {
        let (ek, em) = (Vec3::from(ek), Vec3::from(em));
        let d = helix_se3::conformation::separation(&xi, &ek, &em).norm();
        prop_assume!(d > 0.8 && vector(nu).norm() > 0.1);
        let r = d1_vs_energy(&xi, &ek, &em, &p, &vector(nu), 1e-6);
        prop_assert!(r < 1e-6, "relative error {r:e} at d = {d}");
    }

    #[test]
    fn d2_is_the_derivative_of_d1(
        xi in se3(5.0), ek in arr3(1.0), em in arr3(1.0), p in pair_params(), nu in arr6(1.0)
    ) {
        let (ek, em) = (Vec3::from(ek), Vec3::from(em));
        let d = helix_se3::conformation::separation(&xi, &ek, &em).norm();
        prop_assume!(d > 0.8 && vector(nu).norm() > 0.1);
        let r = d2_vs_d1(&xi, &ek, &em, &p, &vector(nu), 1e-5);
        prop_assert!(r < 1e-5, "relative error {r:e} at d = {d}");
    }

    #[test]
    fn d2_rows_satisfy_the_cross_relation(xi in se3(5.0), ek in arr3(1.0), em in arr3(1.0), p in pair_params()) {
        let (ek, em) = (Vec3::from(ek), Vec3::from(em));
        prop_assume!(helix_se3::conformation::separation(&xi, &ek, &em).norm() > 0.5);
        prop_assert!(cute_relation(&xi, &ek, &em, &p) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn straight_chain_matrix_is_hermitian(k in 1e-3..TAU) {
        let sm = chain().stability_matrix(k);
        prop_assert!(sm.hermiticity_residual < 1e-8, "{:e}", sm.hermiticity_residual);
    }

    #[test]
    fn dispersion_is_reflection_symmetric(k in 1e-3..3.14f64) {
        let a = chain().eigen(k).unwrap().lambdas;
        let b = chain().eigen(TAU - k).unwrap().lambdas;
        let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for j in 0..6 {
            prop_assert!((a[j] - b[j]).abs() < 1e-10 * scale, "j = {j}: {} vs {}", a[j], b[j]);
        }
    }

    #[test]
    fn energy_is_frame_independent(
        r in 0.5..5.0f64, c in 0.3..3.0f64, alpha in 0.0..TAU, g in se3(10.0), axis in arr3(1.0)
    ) {
        let b = dipole(Vec3::from(axis).try_normalize(1e-6).unwrap_or(Vec3::x()), 0.3, 1.0);
        let env = Environment::water(0.01).unwrap();
        let conf = Conformation::new(r, c, alpha, 1.0, b.clone()).unwrap();
        let shells = 30;
        let opts = EnergyOptions { twist_penalty: true, sum: SumRule::fixed(shells) };
        let report = conf.assembly().nonlocal_energy(&env, &opts.sum);
        prop_assume!(!report.diverged);
        let oracle = world_frame_energy(&|s| conf.frame(s), &b, &env, shells as i64, &g);
        let rel = (report.nonlocal - oracle).abs() / oracle.abs().max(1e-300);
        prop_assert!(rel < 1e-12, "pipeline {} vs world frame {}", report.nonlocal, oracle);
    }

    #[test]
    fn energy_is_mirror_symmetric(r in 0.5..5.0f64, c in 0.3..3.0f64, alpha in 0.0..TAU) {
        let b = dipole(Vec3::x(), 0.3, 1.0);
        let env = Environment::water(0.001).unwrap();
        let opts = EnergyOptions { twist_penalty: true, sum: SumRule::fixed(200) };
        let e1 = helix_energy(&b, &env, &opts, [r, c, alpha], 1.0).total;
        let e2 = helix_energy(&b, &env, &opts, [r, -c, -alpha], 1.0).total;
        prop_assume!(e1.is_finite());
        prop_assert!((e1 - e2).abs() < 1e-10 * e1.abs().max(1.0), "{e1} vs {e2}");
    }
}

#[test]
fn doubling_the_window_leaves_lambda_unchanged() {
    let ctx = chain();
    let wide = straight_dipole_chain(0.01, &SumRule::fixed(2 * ctx.window));
    for k in [0.05, 0.4, 1.1, 2.0, 3.1] {
        let a = ctx.eigen(k).unwrap().lambdas;
        let b = wide.eigen(k).unwrap().lambdas;
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for j in 0..6 {
            assert!((a[j] - b[j]).abs() < 1e-9 * scale, "k = {k}, j = {j}: {} vs {}", a[j], b[j]);
        }
    }
}

#[test]
fn doubling_the_window_leaves_the_energy_unchanged() {
    let b = dipole(Vec3::x(), 0.3, 1.0);
    let env = Environment::water(0.001).unwrap();
    for x in [[2.0, 1.0, 0.3], [1.3, 0.4, 1.7], [6.0, 3.0, 0.0]] {
        let r = helix_energy(&b, &env, &EnergyOptions::default(), x, 1.0);
        assert!(r.converged);
        let opts = EnergyOptions { twist_penalty: true, sum: SumRule::fixed(2 * r.shells) };
        let wide = helix_energy(&b, &env, &opts, x, 1.0);
        let rel = (r.total - wide.total).abs() / r.total.abs();
        assert!(rel < 1e-10, "{x:?}: {} vs {} ({rel:e})", r.total, wide.total);
    }
}
