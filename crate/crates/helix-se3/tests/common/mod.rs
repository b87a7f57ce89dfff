//! Residual-returning checks shared by the property tests and the acceptance runner.
#![allow(dead_code)]

use helix_se3::conformation::separation;
use helix_se3::molecule::PairParams;
use helix_se3::se3::{axis_angle, Vec3};
use helix_se3::stability::{ad_star_matrix, d1_covector, d2_block, LinearizationContext};
use helix_se3::{Bouquet, ElasticModel, Environment, Se3, Se3Covector, Se3Vector, SumRule, UnitSystem};
use nalgebra::{Matrix4, Vector6};

pub fn pose(axis: [f64; 3], angle: f64, r: [f64; 3]) -> Se3 {
    let a = Vec3::from(axis);
    let a = if a.norm() < 1e-9 { Vec3::z() } else { a.normalize() };
    Se3::new(axis_angle(&a, angle), Vec3::from(r))
}

pub fn vector(x: [f64; 6]) -> Se3Vector {
    Se3Vector::from_vector6(&Vector6::from(x))
}

pub fn covector(x: [f64; 6]) -> Se3Covector {
    Se3Covector::from_vector6(&Vector6::from(x))
}

/// Worst deviation over associativity, identity, inverse and the homomorphism
/// properties of `Ad` against 4×4 matrix products.
pub fn group_axioms(g: &Se3, h: &Se3, k: &Se3, x: &Se3Vector) -> f64 {
    let mut worst: f64 = 0.0;
    worst = worst.max(g.mul(h).mul(k).distance(&g.mul(&h.mul(k))));
    worst = worst.max(g.mul(&Se3::identity()).distance(g));
    worst = worst.max(Se3::identity().mul(g).distance(g));
    worst = worst.max(g.mul(&g.inv()).distance(&Se3::identity()));
    worst = worst.max(g.inv().mul(g).distance(&Se3::identity()));
    let hm: Matrix4<f64> = g.to_homogeneous() * h.to_homogeneous();
    worst = worst.max((hm - g.mul(h).to_homogeneous()).amax());
    let conj = g.to_homogeneous() * x.to_homogeneous() * g.inv().to_homogeneous();
    worst = worst.max((conj - g.ad(x).to_homogeneous()).amax());
    worst = worst.max((g.mul(h).ad_matrix() - g.ad_matrix() * h.ad_matrix()).amax());
    worst = worst.max((g.ad_matrix() * x.to_vector6() - g.ad(x).to_vector6()).amax());
    worst
}

/// Worst deviation of the pairing dualities and the bracket identities.
pub fn dualities(g: &Se3, x: &Se3Vector, y: &Se3Vector, z: &Se3Vector, p: &Se3Covector) -> f64 {
    let mut worst: f64 = 0.0;
    let scale = 1.0 + p.norm() * (1.0 + x.norm()) * (1.0 + y.norm());
    worst = worst.max((g.ad_star(p).pair(x) - p.pair(&g.ad(x))).abs() / scale);
    worst = worst.max((g.ad_star_inv(p).pair(x) - p.pair(&g.inv().ad(x))).abs() / scale);
    worst = worst.max((x.ad_star(p).pair(y) - p.pair(&x.ad(y))).abs() / scale);
    worst = worst.max((ad_star_matrix(p) * x.to_vector6() - x.ad_star(p).to_vector6()).amax() / scale);
    let (xh, yh) = (x.to_homogeneous(), y.to_homogeneous());
    worst = worst.max((xh * yh - yh * xh - x.ad(y).to_homogeneous()).amax() / scale);
    let jacobi = x.ad(&y.ad(z)) + y.ad(&z.ad(x)) + z.ad(&x.ad(y));
    worst = worst.max(jacobi.norm() / (scale * (1.0 + z.norm())));
    worst
}

/// Internal units, `±q` (in `e`) at `±l_c` along `axis`, `ε/μ = 2.90e-4`.
pub fn dipole(axis: Vec3, q_e: f64, l_c: f64) -> Bouquet {
    Bouquet::dipole(axis, l_c, UnitSystem::default().charge_to_internal(q_e), 1.0, 2.90e-4)
}

/// The ±0.17 e dipole across a straight chain along x.
pub fn straight_dipole_chain(ionic_strength: f64, rule: &SumRule) -> LinearizationContext {
    LinearizationContext::straight_rod(
        dipole(Vec3::y(), 0.17, 1.0),
        Environment::water(ionic_strength).unwrap(),
        ElasticModel::normalized(),
        1.0,
        rule,
    )
    .unwrap()
}

fn pair_energy(xi: &Se3, ek: &Vec3, em: &Vec3, p: &PairParams) -> f64 {
    p.energy(separation(xi, ek, em).norm())
}

/// Relative error of `D₁` against a central difference of `U(Ξ exp(εν))`.
pub fn d1_vs_energy(xi: &Se3, ek: &Vec3, em: &Vec3, p: &PairParams, nu: &Se3Vector, h: f64) -> f64 {
    let moved = |e: f64| xi.mul(&Se3::exp(&(*nu * e)));
    let fd = (pair_energy(&moved(h), ek, em, p) - pair_energy(&moved(-h), ek, em, p)) / (2.0 * h);
    let exact = d1_covector(xi, ek, em, p).unwrap().pair(nu);
    (fd - exact).abs() / exact.abs().max(d1_covector(xi, ek, em, p).unwrap().norm() * nu.norm())
}

/// Relative error of `D₂ν` against a central difference of `D₁(Ξ exp(εν))`.
pub fn d2_vs_d1(xi: &Se3, ek: &Vec3, em: &Vec3, p: &PairParams, nu: &Se3Vector, h: f64) -> f64 {
    let d1 = |e: f64| d1_covector(&xi.mul(&Se3::exp(&(*nu * e))), ek, em, p).unwrap().to_vector6();
    let fd = (d1(h) - d1(-h)) / (2.0 * h);
    let exact = d2_block(xi, ek, em, p).unwrap() * nu.to_vector6();
    (fd - exact).norm() / exact.norm().max(1e-300)
}

/// Worst `|D₂,μ − η_m × D₂,α|` over the six basis columns.
pub fn cute_relation(xi: &Se3, ek: &Vec3, em: &Vec3, p: &PairParams) -> f64 {
    let m = d2_block(xi, ek, em, p).unwrap();
    (0..6)
        .map(|c| {
            let mu: Vec3 = m.fixed_view::<3, 1>(0, c).into();
            let alpha: Vec3 = m.fixed_view::<3, 1>(3, c).into();
            (mu - em.cross(&alpha)).norm() / m.norm().max(1e-300)
        })
        .fold(0.0, f64::max)
}

/// Screened Coulomb plus truncated, shifted LJ written out from scratch.
pub fn reference_pair_energy(d: f64, qq: f64, debye: f64, d0: f64, eps: f64) -> f64 {
    let mut u = qq * (-d / debye).exp() / d;
    let cut = 3.0 * d0;
    if d < cut {
        let lj = |r: f64| eps * ((d0 / r).powi(12) - 2.0 * (d0 / r).powi(6));
        u += lj(d) - lj(cut);
    }
    u
}

/// Nonlocal energy of bouquet 0 summed directly over world-frame node positions
/// of bouquets `-shells..=shells`, after moving the whole chain by `g`.
pub fn world_frame_energy(frames: &dyn Fn(i64) -> Se3, b: &Bouquet, env: &Environment, shells: i64, g: &Se3) -> f64 {
    let world = |s: i64, i: usize| g.mul(&frames(s)).act(&b.nodes[i].offset);
    let mut e = 0.0;
    for s in -shells..=shells {
        if s == 0 {
            continue;
        }
        for (k, nk) in b.nodes.iter().enumerate() {
            for (m, nm) in b.nodes.iter().enumerate() {
                let d = (world(s, m) - world(0, k)).norm();
                let d0 = 0.5 * (nk.lj_radius + nm.lj_radius);
                let eps = (nk.lj_depth * nm.lj_depth).sqrt();
                e += reference_pair_energy(d, nk.charge * nm.charge, env.debye_length, d0, eps);
            }
        }
    }
    e
}
