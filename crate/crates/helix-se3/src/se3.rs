//! The rigid-motion group SE(3), its algebra and their (co)adjoint actions.
//!
//! Elements are pairs `(Λ, r)` acting on points as `x ↦ Λx + r`. Algebra
//! elements are `(ω, v)` with angular part first; covectors `(u, a)` pair with
//! them as `ω·u + v·a`.

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};
use std::ops::{Add, Mul, Neg, Sub};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Skew matrix with `hat(w) * r == w.cross(r)`.
pub fn hat(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

pub fn vee(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rotation by `angle` about the unit vector `axis`.
pub fn axis_angle(axis: &Vec3, angle: f64) -> Mat3 {
    let k = hat(axis);
    Mat3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Frobenius distance from orthogonality, `‖ΛᵀΛ − I‖`.
pub fn orthogonality_defect(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).norm()
}

/// Nearest rotation in the Frobenius sense (polar factor).
pub fn reorthonormalize(m: &Mat3) -> Mat3 {
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * vt;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se3 {
    pub rot: Mat3,
    pub trans: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Se3Vector {
    pub omega: Vec3,
    pub v: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Se3Covector {
    pub u: Vec3,
    pub a: Vec3,
}

impl Se3 {
    pub fn identity() -> Self {
        Se3 { rot: Mat3::identity(), trans: Vec3::zeros() }
    }

    pub fn new(rot: Mat3, trans: Vec3) -> Self {
        Se3 { rot, trans }
    }

    pub fn translation(r: Vec3) -> Self {
        Se3 { rot: Mat3::identity(), trans: r }
    }

    pub fn rotation(rot: Mat3) -> Self {
        Se3 { rot, trans: Vec3::zeros() }
    }

    /// `(Λ₁Λ₂, Λ₁r₂ + r₁)`.
    pub fn mul(&self, other: &Se3) -> Se3 {
        Se3 { rot: self.rot * other.rot, trans: self.rot * other.trans + self.trans }
    }

    pub fn inv(&self) -> Se3 {
        let rt = self.rot.transpose();
        Se3 { rot: rt, trans: -(rt * self.trans) }
    }

    pub fn act(&self, x: &Vec3) -> Vec3 {
        self.rot * x + self.trans
    }

    /// Integer power by repeated squaring; negative powers go through the inverse.
    pub fn pow(&self, n: i64) -> Se3 {
        let mut base = if n < 0 { self.inv() } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Se3::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rot);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.trans);
        m
    }

    /// `Ad_g (ω, v) = (Λω, −Λω × r + Λv)`.
    pub fn ad(&self, x: &Se3Vector) -> Se3Vector {
        let w = self.rot * x.omega;
        Se3Vector { omega: w, v: self.trans.cross(&w) + self.rot * x.v }
    }

    pub fn ad_matrix(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rot);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.rot);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&(hat(&self.trans) * self.rot));
        m
    }

    /// Coadjoint action written with the inverse in the subscript:
    /// `g.ad_star_inv(p)` is `Ad*_{g⁻¹} p = (Λu + r × Λa, Λa)`, the transpose of
    /// `Ad_{g⁻¹}`. Pass `a^{s}` to obtain `Ad*_{a^{-s}}`.
    pub fn ad_star_inv(&self, p: &Se3Covector) -> Se3Covector {
        let la = self.rot * p.a;
        Se3Covector { u: self.rot * p.u + self.trans.cross(&la), a: la }
    }

    /// Standard coadjoint `Ad*_g = (Ad_g)ᵀ`, dual to [`Se3::ad`].
    pub fn ad_star(&self, p: &Se3Covector) -> Se3Covector {
        let rt = self.rot.transpose();
        Se3Covector { u: rt * (p.u - self.trans.cross(&p.a)), a: rt * p.a }
    }

    /// Closed-form exponential with a series fallback for small rotation angles.
    pub fn exp(x: &Se3Vector) -> Se3 {
        let th2 = x.omega.norm_squared();
        let th = th2.sqrt();
        let w = hat(&x.omega);
        let w2 = w * w;
        let (a, b, c) = if th < 1e-6 {
            (1.0 - th2 / 6.0, 0.5 - th2 / 24.0, 1.0 / 6.0 - th2 / 120.0)
        } else {
            let s = th.sin();
            let h = (0.5 * th).sin();
            (s / th, 2.0 * h * h / th2, (th - s) / (th2 * th))
        };
        let rot = Mat3::identity() + w * a + w2 * b;
        let v = Mat3::identity() + w * b + w2 * c;
        Se3 { rot, trans: v * x.v }
    }

    pub fn distance(&self, other: &Se3) -> f64 {
        ((self.rot - other.rot).norm_squared() + (self.trans - other.trans).norm_squared()).sqrt()
    }
}

impl Se3Vector {
    pub fn new(omega: Vec3, v: Vec3) -> Self {
        Se3Vector { omega, v }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_vector6(x: &Vector6<f64>) -> Self {
        Se3Vector { omega: x.fixed_rows::<3>(0).into(), v: x.fixed_rows::<3>(3).into() }
    }

    pub fn to_vector6(&self) -> Vector6<f64> {
        let mut x = Vector6::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&self.omega);
        x.fixed_rows_mut::<3>(3).copy_from(&self.v);
        x
    }

    /// `ad_x y = (ω₁ × ω₂, ω₁ × v₂ − ω₂ × v₁)`.
    pub fn ad(&self, y: &Se3Vector) -> Se3Vector {
        Se3Vector {
            omega: self.omega.cross(&y.omega),
            v: self.omega.cross(&y.v) - y.omega.cross(&self.v),
        }
    }

    pub fn ad_matrix(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        let w = hat(&self.omega);
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&w);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&w);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&hat(&self.v));
        m
    }

    /// `ad*_x (u, a) = (u × ω − v × a, −ω × a)`.
    pub fn ad_star(&self, p: &Se3Covector) -> Se3Covector {
        Se3Covector {
            u: p.u.cross(&self.omega) - self.v.cross(&p.a),
            a: -self.omega.cross(&p.a),
        }
    }

    /// 4×4 matrix representative in the algebra of homogeneous transforms.
    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&hat(&self.omega));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.v);
        m
    }

    pub fn norm(&self) -> f64 {
        (self.omega.norm_squared() + self.v.norm_squared()).sqrt()
    }
}

impl Se3Covector {
    pub fn new(u: Vec3, a: Vec3) -> Self {
        Se3Covector { u, a }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_vector6(x: &Vector6<f64>) -> Self {
        Se3Covector { u: x.fixed_rows::<3>(0).into(), a: x.fixed_rows::<3>(3).into() }
    }

    pub fn to_vector6(&self) -> Vector6<f64> {
        let mut x = Vector6::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&self.u);
        x.fixed_rows_mut::<3>(3).copy_from(&self.a);
        x
    }

    pub fn pair(&self, x: &Se3Vector) -> f64 {
        self.u.dot(&x.omega) + self.a.dot(&x.v)
    }

    pub fn norm(&self) -> f64 {
        (self.u.norm_squared() + self.a.norm_squared()).sqrt()
    }
}

pub fn pairing(p: &Se3Covector, x: &Se3Vector) -> f64 {
    p.pair(x)
}

/// Trace form `½ tr(Ω₁ᵀΩ₂) + v₁·v₂` on 4×4 representatives; equals the vector
/// pairing when the covector is identified with an algebra element.
pub fn trace_pairing(x: &Se3Vector, y: &Se3Vector) -> f64 {
    let (a, b) = (hat(&x.omega), hat(&y.omega));
    0.5 * (a.transpose() * b).trace() + x.v.dot(&y.v)
}

/// Central-difference residual of the derivative formula
/// `d/dε Ad*_{A(ε)⁻¹} α(ε) = Ad*_{A⁻¹}(ξ − ad*_a α)` along
/// `A(ε) = A₀ exp(εa)`, `α(ε) = α₀ + εξ`.
pub fn ad_star_derivative_check(
    a0: &Se3,
    a: &Se3Vector,
    alpha0: &Se3Covector,
    xi: &Se3Covector,
    h: f64,
) -> f64 {
    let curve = |e: f64| {
        let ae = a0.mul(&Se3::exp(&Se3Vector::new(a.omega * e, a.v * e)));
        ae.ad_star_inv(&(*alpha0 + *xi * e))
    };
    let fd = (curve(h) - curve(-h)) * (0.5 / h);
    let exact = a0.ad_star_inv(&(*xi - a.ad_star(alpha0)));
    (fd - exact).norm()
}

macro_rules! linear_ops {
    ($t:ident, $f1:ident, $f2:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                $t { $f1: self.$f1 + o.$f1, $f2: self.$f2 + o.$f2 }
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                $t { $f1: self.$f1 - o.$f1, $f2: self.$f2 - o.$f2 }
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                $t { $f1: -self.$f1, $f2: -self.$f2 }
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t {
                $t { $f1: self.$f1 * s, $f2: self.$f2 * s }
            }
        }
    };
}

linear_ops!(Se3Vector, omega, v);
linear_ops!(Se3Covector, u, a);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hat_is_cross_product() {
        let e = hat(&Vec3::x()) * Vec3::y();
        assert_eq!(e, Vec3::z());
        assert_eq!(hat(&Vec3::zeros()), Mat3::zeros());
        let w = Vec3::new(0.3, -1.2, 2.5);
        assert_eq!(hat(&w).transpose(), -hat(&w));
        assert_eq!(vee(&hat(&w)), w);
    }

    #[test]
    fn inverse_of_translation() {
        let g = Se3::translation(Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(g.inv().trans, Vec3::new(-1.0, -2.0, -3.0));
        assert_eq!(Se3::identity().inv(), Se3::identity());
    }

    #[test]
    fn ad_of_pure_rotation() {
        let r = axis_angle(&Vec3::new(1.0, 1.0, 0.0).normalize(), 0.7);
        let x = Se3Vector::new(Vec3::z(), Vec3::zeros());
        let y = Se3::rotation(r).ad(&x);
        assert_relative_eq!(y.omega, r * Vec3::z(), epsilon = 1e-15);
        assert_relative_eq!(y.v.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ad_algebra_examples() {
        let x = Se3Vector::new(Vec3::x(), Vec3::zeros());
        let y = Se3Vector::new(Vec3::y(), Vec3::zeros());
        assert_eq!(x.ad(&y).omega, Vec3::z());
        assert_eq!(x.ad(&x), Se3Vector::zero());
    }

    #[test]
    fn coadjoint_translation_example() {
        let r = Vec3::new(0.0, 0.0, 2.0);
        let p = Se3Covector::new(Vec3::zeros(), Vec3::x());
        let q = Se3::translation(r).ad_star_inv(&p);
        assert_eq!(q.u, r.cross(&Vec3::x()));
        assert_eq!(q.a, Vec3::x());
        assert_eq!(Se3::identity().ad_star_inv(&p), p);
    }

    #[test]
    fn ad_star_algebra_example() {
        let x = Se3Vector::new(Vec3::z(), Vec3::zeros());
        let p = Se3Covector::new(Vec3::zeros(), Vec3::x());
        let q = x.ad_star(&p);
        assert_eq!(q.u, Vec3::zeros());
        assert_eq!(q.a, -Vec3::y());
    }

    #[test]
    fn exp_examples() {
        assert_eq!(Se3::exp(&Se3Vector::zero()), Se3::identity());
        let t = Se3::exp(&Se3Vector::new(Vec3::zeros(), Vec3::z()));
        assert_eq!(t, Se3::translation(Vec3::z()));
        let th = 1.234;
        let g = Se3::exp(&Se3Vector::new(Vec3::z() * th, Vec3::zeros()));
        assert_relative_eq!(g.rot, rot_z(th), epsilon = 1e-14);
        assert_relative_eq!(g.trans.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_small_angle_branch_is_continuous() {
        let v = Vec3::new(0.2, -0.4, 1.0);
        for th in [9.9e-7, 1.01e-6] {
            let x = Se3Vector::new(Vec3::new(1.0, 2.0, -2.0).normalize() * th, v);
            let g = Se3::exp(&x);
            let reference = exp_by_series(&x);
            assert!(g.distance(&reference) < 1e-14);
        }
    }

    fn exp_by_series(x: &Se3Vector) -> Se3 {
        let m = x.to_homogeneous();
        let mut term = Matrix4::identity();
        let mut acc = Matrix4::identity();
        for n in 1..30 {
            term = term * m / n as f64;
            acc += term;
        }
        Se3::new(acc.fixed_view::<3, 3>(0, 0).into(), acc.fixed_view::<3, 1>(0, 3).into())
    }

    #[test]
    fn exp_matches_matrix_series() {
        let x = Se3Vector::new(Vec3::new(0.4, -1.1, 0.9), Vec3::new(1.0, 0.5, -2.0));
        assert!(Se3::exp(&x).distance(&exp_by_series(&x)) < 1e-13);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let g = Se3::exp(&Se3Vector::new(Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0, 0.0, 0.5)));
        let mut acc = Se3::identity();
        for _ in 0..7 {
            acc = acc.mul(&g);
        }
        assert!(g.pow(7).distance(&acc) < 1e-13);
        assert!(g.pow(-7).distance(&acc.inv()) < 1e-13);
    }

    #[test]
    fn ad_star_derivative_trivial_cases() {
        let z = Se3Vector::zero();
        let zc = Se3Covector::zero();
        assert_eq!(ad_star_derivative_check(&Se3::identity(), &z, &zc, &zc, 1e-5), 0.0);
        let g = Se3::new(axis_angle(&Vec3::y(), 0.3), Vec3::new(1.0, 2.0, 3.0));
        let xi = Se3Covector::new(Vec3::new(1.0, 0.0, 2.0), Vec3::new(0.0, -1.0, 0.5));
        let alpha = Se3Covector::new(Vec3::new(0.3, 0.3, 0.3), Vec3::x());
        assert!(ad_star_derivative_check(&g, &z, &alpha, &xi, 1e-5) < 1e-9);
    }

    #[test]
    fn reorthonormalize_restores_rotation() {
        let r = axis_angle(&Vec3::new(1.0, -2.0, 0.5).normalize(), 2.0);
        let noisy = r + Mat3::from_element(1e-6);
        let fixed = reorthonormalize(&noisy);
        assert!(orthogonality_defect(&fixed) < 1e-14);
        assert!((fixed.determinant() - 1.0).abs() < 1e-14);
        assert!((fixed - r).norm() < 1e-5);
    }
}
