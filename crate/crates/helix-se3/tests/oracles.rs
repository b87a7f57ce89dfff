mod common;

use common::*;
use helix_se3::conformation::{
    find_minima, helix_energy, landscape_scan, linspace, refine_helix, stationarity_check, two_helix_optimize,
    EnergyOptions, LandscapeSpec, TwoHelixParams,
};
use helix_se3::se3::Vec3;
use helix_se3::stability::hessian_reference;
use helix_se3::{Conformation, Environment, HelicalAssembly, Se3, SumRule};

#[test]
fn straight_chain_energy_matches_a_direct_lattice_sum() {
    let b = dipole(Vec3::y(), 0.3, 1.0);
    let env = Environment::water(0.01).unwrap();
    let chain = HelicalAssembly { screw_angle: 0.0, screw_rise: 1.0, frames: vec![Se3::identity()], bouquet: b.clone() };
    let r = chain.nonlocal_energy(&env, &SumRule::default());
    assert!(r.converged && r.shells < 10_000);
    let direct = world_frame_energy(&|s| Se3::translation(Vec3::z() * s as f64), &b, &env, 10_000, &Se3::identity());
    assert!((r.nonlocal - direct).abs() < 1e-10 * direct.abs(), "{} vs {direct}", r.nonlocal);
}

#[test]
fn landscape_cells_re_evaluate_exactly() {
    let b = dipole(Vec3::x(), 0.3, 1.0);
    let env = Environment::water(0.01).unwrap();
    let spec = LandscapeSpec {
        r_axis: linspace(0.5, 3.0, 4),
        c_axis: linspace(0.4, 1.6, 3),
        alpha_samples: 12,
        bond: 1.0,
        options: EnergyOptions::default(),
    };
    let grid = landscape_scan(&b, &env, &spec).unwrap();
    for (i, r) in grid.r_values.iter().enumerate() {
        for (j, c) in grid.c_values.iter().enumerate() {
            let idx = grid.index(i, j);
            if grid.diverged[idx] {
                continue;
            }
            let e = helix_energy(&b, &env, &spec.options, [*r, *c, grid.argmin_alpha[idx]], 1.0).total;
            assert!((e - grid.energy[idx]).abs() <= 1e-12 * e.abs().max(1.0), "({r}, {c}): {e} vs {}", grid.energy[idx]);
        }
    }
}

#[test]
fn refined_minima_are_stationary_and_perturbations_are_not() {
    let b = dipole(Vec3::x(), 0.3, 1.0);
    let env = Environment::water(0.01).unwrap();
    let opts = EnergyOptions::default();
    let spec = LandscapeSpec {
        r_axis: linspace(1.0, 2.0, 11),
        c_axis: linspace(0.3, 0.6, 4),
        alpha_samples: 12,
        bond: 1.0,
        options: opts,
    };
    let grid = landscape_scan(&b, &env, &spec).unwrap();
    let found = find_minima(&grid, &b, &env, &opts, 1.0, 1e-6);
    assert!(!found.is_empty());
    for m in &found {
        let conf = Conformation::new(m.radius, m.pitch, m.alpha, 1.0, b.clone()).unwrap();
        let g = stationarity_check(&conf, &env, &opts);
        assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-6, "{m:?}: {g:?}");
        let off = Conformation::new(m.radius + 0.03, m.pitch, m.alpha, 1.0, b.clone()).unwrap();
        let g = stationarity_check(&off, &env, &opts);
        assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3, "{m:?}: {g:?}");
    }
}

#[test]
fn frozen_pose_two_helix_stays_at_the_one_helix_minimum() {
    let b = dipole(Vec3::x(), 0.3, 1.0);
    let env = Environment::water(0.01).unwrap();
    let opts = EnergyOptions::default();
    let one = refine_helix(&b, &env, &opts, [1.45, 0.4, 1.6], 1.0);
    assert!(one.gradient_norm < 1e-6, "{one:?}");
    let start = TwoHelixParams::degenerate(one.radius, one.pitch, one.alpha);
    let two = two_helix_optimize(&b, &env, &opts, &start, 1.0, true, 2000);
    assert!((two.params.radius - one.radius).abs() < 1e-6);
    assert!((two.params.pitch - one.pitch).abs() < 1e-6);
    assert!((two.energy - one.energy).abs() < 1e-10 * one.energy.abs());
}

#[test]
fn twist_entry_agrees_with_the_brute_force_hessian() {
    let ctx = straight_dipole_chain(0.01, &SumRule::default());
    for k in [0.3, 1.1, 2.5] {
        let brute = hessian_reference(&ctx, k, 1e-4);
        let m = ctx.stability_matrix(k).m;
        let (a, b) = (m[(0, 0)].re, brute[(0, 0)].re);
        assert!((a - b).abs() < 1e-5 * a.abs().max(1.0), "k = {k}: {a} vs {b}");
    }
}
