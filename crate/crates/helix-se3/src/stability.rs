//! Linear stability of helical states: the nonlocal derivative operators, the
//! Fourier-space stability matrix `M(k)` and its generalized eigenvalues `λ = ω²`.
//!
//! Pair geometry: with `Ξ = (ξ, κ)` and body-frame separation
//! `b = ξᵀ(κ + ξη_m − η_k)`, perturbing `Ξ ↦ Ξ exp(ν)` moves `b` by
//! `Ψ + c × φ` where `c = ξᵀ(κ − η_k)` and `ν = (φ, Ψ)`.

use crate::conformation::{separation, Conformation};
use crate::eigen::{jacobi_hermitian, CMatrix6};
use crate::molecule::{Bouquet, ElasticModel, Environment, PairParams};
use crate::se3::{hat, Mat3, Se3, Se3Covector, Se3Vector, Vec3};
use crate::sum::{shell_sum, SumRule};
use crate::Error;
use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

type CVector6 = Vector6<Complex64>;

/// Hard limit on the Hermiticity residual of `M(k)` before eigen-solving.
pub const HERMITICITY_LIMIT: f64 = 1e-6;

fn geometry(xi: &Se3, ek: &Vec3, em: &Vec3) -> Result<(Vec3, f64), Error> {
    let b = xi.rot.transpose() * separation(xi, ek, em);
    let d = b.norm();
    if !(d > 1e-12) {
        return Err(Error::Domain("coincident nodes in a nonlocal pair".into()));
    }
    Ok((b, d))
}

/// `D₁ = Q (η_m × b, b)`: the body-frame gradient of the pair energy.
pub fn d1_covector(xi: &Se3, ek: &Vec3, em: &Vec3, pair: &PairParams) -> Result<Se3Covector, Error> {
    let (b, d) = geometry(xi, ek, em)?;
    let q = pair.derivs(d).q;
    Ok(Se3Covector::new(em.cross(&b) * q, b * q))
}

/// `I₂ = (η_m × b)·μ + b·α`, the pairing of `D₁/Q` with `(μ, α)`.
pub fn i2_scalar(xi: &Se3, mu: &Vec3, alpha: &Vec3, ek: &Vec3, em: &Vec3) -> f64 {
    let b = xi.rot.transpose() * separation(xi, ek, em);
    em.cross(&b).dot(mu) + b.dot(alpha)
}

/// Derivative of [`d1_covector`] along `Ξ exp(εν)` as a matrix on `ν = (φ, Ψ)`:
/// `D₂,α = (Q′/d)(b·δb) b + Q δb` and `D₂,μ = η_m × D₂,α`.
pub fn d2_block(xi: &Se3, ek: &Vec3, em: &Vec3, pair: &PairParams) -> Result<Matrix6<f64>, Error> {
    let (b, d) = geometry(xi, ek, em)?;
    let r = pair.derivs(d);
    let c = xi.rot.transpose() * (xi.trans - ek);
    // δb = J ν with J = [ĉ | I].
    let mut jac = nalgebra::Matrix3x6::<f64>::zeros();
    jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&hat(&c));
    jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&Mat3::identity());
    let alpha_rows = (b * b.transpose()) * jac * (r.dq / d) + jac * r.q;
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 6>(0, 0).copy_from(&(hat(em) * alpha_rows));
    m.fixed_view_mut::<3, 6>(3, 0).copy_from(&alpha_rows);
    Ok(m)
}

/// Matrix of `X ↦ ad*_X p`.
pub fn ad_star_matrix(p: &Se3Covector) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&hat(&p.u));
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&hat(&p.a));
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&hat(&p.a));
    m
}

/// How the base state enters the linearization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearization {
    /// Straight unstressed rod: `Ad` acts as the identity, `D₁` and `K₀` vanish.
    StraightRod,
    /// Full operator with the adjoint actions of the helical generator.
    General,
}

#[derive(Debug, Clone)]
struct Offset {
    d2: Matrix6<f64>,
    d1: Se3Covector,
}

/// Summed pair operators at offsets `±s`, plus the `k`-independent pieces of
/// `𝕃(±s) = Z − e^{±iks} P`.
#[derive(Debug, Clone)]
struct Shell {
    pos: Offset,
    neg: Offset,
    z_pos: Matrix6<f64>,
    z_neg: Matrix6<f64>,
    p_pos: Matrix6<f64>,
    p_neg: Matrix6<f64>,
}

#[derive(Debug, Clone)]
pub struct LinearizationContext {
    pub generator: Se3,
    pub bouquet: Bouquet,
    pub environment: Environment,
    pub elastic: ElasticModel,
    pub base_stress: Se3Covector,
    pub mode: Linearization,
    pub window: usize,
    pub converged: bool,
    shells: Vec<Shell>,
}

impl LinearizationContext {
    pub fn new(
        generator: Se3,
        bouquet: Bouquet,
        environment: Environment,
        elastic: ElasticModel,
        base_stress: Se3Covector,
        mode: Linearization,
        rule: &SumRule,
    ) -> Result<Self, Error> {
        let mut ctx = LinearizationContext {
            generator,
            bouquet,
            environment,
            elastic,
            base_stress,
            mode,
            window: 0,
            converged: false,
            shells: vec![],
        };
        let mut shells = vec![];
        let mut failure = None;
        let summary = shell_sum(rule, |s| match ctx.build_shell(s as i64) {
            Ok(sh) => {
                let n = sh.z_pos.norm() + sh.z_neg.norm() + sh.p_pos.norm() + sh.p_neg.norm();
                shells.push(sh);
                n
            }
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        ctx.window = summary.shells;
        ctx.converged = summary.converged;
        ctx.shells = shells;
        Ok(ctx)
    }

    /// Straight chain along x with spacing `spacing`.
    pub fn straight_rod(
        bouquet: Bouquet,
        environment: Environment,
        elastic: ElasticModel,
        spacing: f64,
        rule: &SumRule,
    ) -> Result<Self, Error> {
        let a = Se3::translation(Vec3::x() * spacing);
        Self::new(a, bouquet, environment, elastic, Se3Covector::zero(), Linearization::StraightRod, rule)
    }

    pub fn from_conformation(
        conf: &Conformation,
        environment: Environment,
        elastic: ElasticModel,
        base_stress: Se3Covector,
        rule: &SumRule,
    ) -> Result<Self, Error> {
        Self::new(
            conf.generator,
            conf.bouquet.clone(),
            environment,
            elastic,
            base_stress,
            Linearization::General,
            rule,
        )
    }

    fn offset(&self, s: i64) -> Result<Offset, Error> {
        let xi = self.generator.pow(s);
        let mut d2 = Matrix6::zeros();
        let mut d1 = Se3Covector::zero();
        for nk in &self.bouquet.nodes {
            for nm in &self.bouquet.nodes {
                let p = PairParams::mix(nk, nm, &self.environment);
                if p.is_null() {
                    continue;
                }
                d2 += d2_block(&xi, &nk.offset, &nm.offset, &p)?;
                d1 = d1 + d1_covector(&xi, &nk.offset, &nm.offset, &p)?;
            }
        }
        Ok(Offset { d2, d1 })
    }

    /// `Z` and `P` for a signed offset: `W = Ad*_{a^{−s}}(D₂(a^s) − ad*_{·}D₁(a^s))`,
    /// `Z = W Ad_{a^{−s}} + D₂(a^{−s})`, `P = W + D₂(a^{−s}) Ad_{a^s}`.
    fn zp(&self, s: i64, here: &Offset, there: &Offset) -> (Matrix6<f64>, Matrix6<f64>) {
        match self.mode {
            Linearization::StraightRod => {
                let z = here.d2 + there.d2;
                (z, z)
            }
            Linearization::General => {
                let g = self.generator.pow(s);
                let ad_pos = g.ad_matrix();
                let ad_neg = g.inv().ad_matrix();
                let w = ad_neg.transpose() * (here.d2 - ad_star_matrix(&here.d1));
                (w * ad_neg + there.d2, w + there.d2 * ad_pos)
            }
        }
    }

    fn build_shell(&self, s: i64) -> Result<Shell, Error> {
        let pos = self.offset(s)?;
        let neg = self.offset(-s)?;
        let (z_pos, p_pos) = self.zp(s, &pos, &neg);
        let (z_neg, p_neg) = self.zp(-s, &neg, &pos);
        Ok(Shell { pos, neg, z_pos, z_neg, p_pos, p_neg })
    }

    fn ad_pair(&self, s: i64) -> (Matrix6<f64>, Matrix6<f64>) {
        match self.mode {
            Linearization::StraightRod => (Matrix6::identity(), Matrix6::identity()),
            Linearization::General => {
                let g = self.generator.pow(s);
                (g.ad_matrix(), g.inv().ad_matrix())
            }
        }
    }

    fn offset_ops(&self, s: i64) -> Option<&Offset> {
        let i = s.unsigned_abs() as usize;
        if i == 0 || i > self.shells.len() {
            return None;
        }
        let sh = &self.shells[i - 1];
        Some(if s > 0 { &sh.pos } else { &sh.neg })
    }

    /// Contribution `𝕃(s′)S` summed over node pairs, evaluated term by term.
    pub fn l_operator(&self, s: i64, k: f64, v: &CVector6) -> CVector6 {
        let (Some(here), Some(there)) = (self.offset_ops(s), self.offset_ops(-s)) else {
            return CVector6::zeros();
        };
        let (ad_pos, ad_neg) = self.ad_pair(s);
        let phase = Complex64::from_polar(1.0, k * s as f64);
        let cast = |m: &Matrix6<f64>| m.map(|x| Complex64::new(x, 0.0));
        let x = -cast(&ad_neg) * v + v * phase;
        let y = -(cast(&ad_pos) * v) * phase + v;
        let d1 = if self.mode == Linearization::General { here.d1 } else { Se3Covector::zero() };
        let inner = cast(&here.d2) * x - ad_star_complex(&x, &d1);
        let coad = match self.mode {
            Linearization::StraightRod => inner,
            Linearization::General => cast(&ad_neg.transpose()) * inner,
        };
        -coad + cast(&there.d2) * y
    }

    fn elastic_block(&self) -> Matrix6<f64> {
        match self.mode {
            Linearization::StraightRod => self.elastic.rigidity,
            Linearization::General => {
                let t = self.generator.inv().ad_matrix().transpose();
                t * (self.elastic.rigidity - ad_star_matrix(&self.base_stress))
            }
        }
    }

    pub fn stability_matrix(&self, k: f64) -> StabilityMatrix {
        let e = self.elastic_block() * (4.0 * (0.5 * k).sin().powi(2));
        let mut m = e.map(|x| Complex64::new(x, 0.0));
        for (i, sh) in self.shells.iter().enumerate() {
            let s = (i + 1) as f64;
            let ep = Complex64::from_polar(1.0, k * s);
            let en = ep.conj();
            for r in 0..6 {
                for c in 0..6 {
                    m[(r, c)] += Complex64::new(sh.z_pos[(r, c)] + sh.z_neg[(r, c)], 0.0)
                        - ep * sh.p_pos[(r, c)]
                        - en * sh.p_neg[(r, c)];
                }
            }
        }
        StabilityMatrix::new(k, m)
    }

    pub fn min_lambda(&self, k: f64) -> Result<f64, Error> {
        Ok(self.eigen(k)?.lambdas[0])
    }

    pub fn eigen(&self, k: f64) -> Result<EigenSolution, Error> {
        generalized_eigen(&self.stability_matrix(k), &self.elastic.inertia)
    }
}

fn ad_star_complex(x: &CVector6, p: &Se3Covector) -> CVector6 {
    ad_star_matrix(p).map(|v| Complex64::new(v, 0.0)) * x
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMatrix {
    pub k: f64,
    pub m: CMatrix6,
    pub hermiticity_residual: f64,
}

impl StabilityMatrix {
    pub fn new(k: f64, m: CMatrix6) -> Self {
        let r = (m - m.adjoint()).norm() / m.norm().max(1e-300);
        StabilityMatrix { k, m, hermiticity_residual: r }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub lambdas: [f64; 6],
    pub vectors: CMatrix6,
    /// Largest `‖M S − λ I₀ S‖ / ‖S‖` over the six pairs.
    pub residual: f64,
    pub hermiticity_residual: f64,
}

/// Solves `M S = λ I₀ S` through the Cholesky reduction of `I₀`.
pub fn generalized_eigen(sm: &StabilityMatrix, inertia: &Matrix6<f64>) -> Result<EigenSolution, Error> {
    if sm.hermiticity_residual > HERMITICITY_LIMIT {
        return Err(Error::Numerical(format!(
            "stability matrix is not Hermitian at k = {} (residual {:e})",
            sm.k, sm.hermiticity_residual
        )));
    }
    let chol = inertia
        .cholesky()
        .ok_or_else(|| Error::Domain("inertia matrix is not positive definite".into()))?;
    let l_inv = chol.l().try_inverse().ok_or_else(|| Error::Domain("singular inertia".into()))?;
    let li = l_inv.map(|x| Complex64::new(x, 0.0));
    let h = (sm.m + sm.m.adjoint()) * Complex64::new(0.5, 0.0);
    let reduced = li * h * li.transpose();
    let reduced = (reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0);
    let (lambdas, y) = jacobi_hermitian(&reduced);
    let vectors = li.transpose() * y;
    let i0 = inertia.map(|x| Complex64::new(x, 0.0));
    let mut residual: f64 = 0.0;
    for c in 0..6 {
        let s = vectors.column(c);
        let r = sm.m * s - (i0 * s) * Complex64::new(lambdas[c], 0.0);
        residual = residual.max(r.norm() / s.norm());
    }
    Ok(EigenSolution { lambdas, vectors, residual, hermiticity_residual: sm.hermiticity_residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    pub k_values: Vec<f64>,
    pub lambdas: Vec<[f64; 6]>,
    pub hermiticity: Vec<f64>,
    pub eigen_residual: Vec<f64>,
    /// Grid-resolution intervals on which the smallest `λ` is negative.
    pub unstable_band: Vec<(f64, f64)>,
}

/// `n` uniform points in `(0, π]`.
pub fn default_k_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| PI * i as f64 / n as f64).collect()
}

pub fn dispersion(ctx: &LinearizationContext, k_grid: &[f64]) -> Result<DispersionResult, Error> {
    let sols: Vec<EigenSolution> = k_grid.par_iter().map(|&k| ctx.eigen(k)).collect::<Result<_, _>>()?;
    let mut band = vec![];
    let mut open: Option<(f64, f64)> = None;
    for (k, s) in k_grid.iter().zip(&sols) {
        if s.lambdas[0] < 0.0 {
            open = Some(match open {
                Some((a, _)) => (a, *k),
                None => (*k, *k),
            });
        } else if let Some(b) = open.take() {
            band.push(b);
        }
    }
    band.extend(open);
    Ok(DispersionResult {
        k_values: k_grid.to_vec(),
        lambdas: sols.iter().map(|s| s.lambdas).collect(),
        hermiticity: sols.iter().map(|s| s.hermiticity_residual).collect(),
        eigen_residual: sols.iter().map(|s| s.residual).collect(),
        unstable_band: band,
    })
}

/// `{2πn/N : 0 < n < N}`.
pub fn allowed_wavenumbers(n: usize) -> Result<Vec<f64>, Error> {
    if n < 2 {
        return Err(Error::Domain(format!("chain length must be at least 2, got {n}")));
    }
    Ok((1..n).map(|i| TAU * i as f64 / n as f64).collect())
}

/// Upper edge of the unstable band: the largest `k` in `(0, π]` with a negative
/// eigenvalue, located on the grid and refined by bisection to `tol`. Zero when
/// the grid shows no instability.
pub fn band_edge(ctx: &LinearizationContext, k_grid: &[f64], tol: f64) -> Result<f64, Error> {
    let mins: Vec<f64> = k_grid.par_iter().map(|&k| ctx.min_lambda(k)).collect::<Result<_, _>>()?;
    let Some(last) = mins.iter().rposition(|&l| l < 0.0) else {
        return Ok(0.0);
    };
    if last + 1 == k_grid.len() {
        return Ok(k_grid[last]);
    }
    let (mut lo, mut hi) = (k_grid[last], k_grid[last + 1]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ctx.min_lambda(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Whether every allowed wavenumber of an `n`-unit chain has `λ ≥ 0`.
pub fn chain_is_stable(ctx: &LinearizationContext, n: usize) -> Result<bool, Error> {
    for k in allowed_wavenumbers(n)? {
        let k = if k > PI { TAU - k } else { k };
        if ctx.min_lambda(k)? < 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest stable chain length given the band edge; `None` if every length is stable.
pub fn max_stable_length(ctx: &LinearizationContext, k_star: f64) -> Result<Option<usize>, Error> {
    if k_star <= 0.0 {
        return Ok(None);
    }
    let cap = (TAU / k_star).floor() as usize + 1;
    let mut best = 0;
    for n in 2..=cap.max(2) {
        if chain_is_stable(ctx, n)? {
            best = n;
        }
    }
    Ok(Some(best))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub ionic_strength: f64,
    pub debye_length: f64,
    pub k_star: f64,
    pub max_stable_n: Option<usize>,
    pub window: usize,
}

#[derive(Debug, Clone)]
pub struct StraightRodSetup {
    pub bouquet: Bouquet,
    pub elastic: ElasticModel,
    pub relative_permittivity: f64,
    pub temperature: f64,
    pub spacing: f64,
    pub rule: SumRule,
    pub k_grid: Vec<f64>,
    pub k_tolerance: f64,
}

impl StraightRodSetup {
    pub fn context(&self, ionic_strength: f64) -> Result<LinearizationContext, Error> {
        let env = Environment::new(ionic_strength, self.relative_permittivity, self.temperature)?;
        LinearizationContext::straight_rod(self.bouquet.clone(), env, self.elastic.clone(), self.spacing, &self.rule)
    }

    pub fn k_star(&self, ionic_strength: f64) -> Result<f64, Error> {
        band_edge(&self.context(ionic_strength)?, &self.k_grid, self.k_tolerance)
    }
}

pub fn instability_scan(setup: &StraightRodSetup, ionic_strengths: &[f64]) -> Result<Vec<ScanRow>, Error> {
    ionic_strengths
        .iter()
        .map(|&i| {
            let ctx = setup.context(i)?;
            let k_star = band_edge(&ctx, &setup.k_grid, setup.k_tolerance)?;
            Ok(ScanRow {
                ionic_strength: i,
                debye_length: ctx.environment.debye_length,
                k_star,
                max_stable_n: max_stable_length(&ctx, k_star)?,
                window: ctx.window,
            })
        })
        .collect()
}

/// Ionic strength at which the band closes, bisected geometrically between a
/// stable and an unstable end of `[lo, hi]` to relative width `rel_tol`.
pub fn critical_ionic_strength(setup: &StraightRodSetup, lo: f64, hi: f64, rel_tol: f64) -> Result<Option<f64>, Error> {
    let (mut a, mut b) = (lo, hi);
    let unstable_a = setup.k_star(a)? > 0.0;
    let unstable_b = setup.k_star(b)? > 0.0;
    if unstable_a == unstable_b {
        return Ok(None);
    }
    while b / a - 1.0 > rel_tol {
        let mid = (a * b).sqrt();
        if (setup.k_star(mid)? > 0.0) == unstable_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some((a * b).sqrt()))
}

/// A straight chain of two-charge bouquets restricted to twisting about its axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistChain {
    pub charge: f64,
    pub l_c: f64,
    pub spacing: f64,
    pub lj_radius: f64,
    pub lj_depth: f64,
    pub debye_length: f64,
    pub rigidity: f64,
    pub inertia: f64,
    pub rule: SumRule,
}

impl TwistChain {
    /// Reads the chain from a two-node bouquet with opposite charges at `±η`.
    pub fn from_bouquet(b: &Bouquet, env: &Environment, elastic: &ElasticModel, spacing: f64, rule: SumRule) -> Result<Self, Error> {
        if b.nodes.len() != 2 || (b.nodes[0].offset + b.nodes[1].offset).norm() > 1e-12 {
            return Err(Error::Domain("twist chain needs two nodes placed symmetrically about the axis".into()));
        }
        let (n0, n1) = (&b.nodes[0], &b.nodes[1]);
        if n0.charge != -n1.charge || n0.lj_radius != n1.lj_radius || n0.lj_depth != n1.lj_depth {
            return Err(Error::Domain("twist chain needs opposite charges and equal LJ parameters".into()));
        }
        Ok(TwistChain {
            charge: n0.charge,
            l_c: n0.offset.norm(),
            spacing,
            lj_radius: n0.lj_radius,
            lj_depth: n0.lj_depth,
            debye_length: env.debye_length,
            rigidity: elastic.rigidity[(0, 0)],
            inertia: elastic.inertia[(0, 0)],
            rule,
        })
    }
}

/// `ω²` of the pure twist mode:
/// `Iω² = 4J sin²(k/2) + Σ_m 4l_c² [U′₊(ml)/(ml) − U′₋(r_m)/r_m] 4 sin²(mk/2)`,
/// with `U₊`/`U₋` the like/unlike pair potentials and `r_m = sqrt(m²l² + 4l_c²)`.
pub fn twist_dispersion_analytic(k: f64, c: &TwistChain) -> f64 {
    let like = PairParams { qq: c.charge * c.charge, lambda: c.debye_length, d0: c.lj_radius, eps: c.lj_depth };
    let unlike = PairParams { qq: -c.charge * c.charge, ..like };
    let coef = |m: usize| {
        let d = m as f64 * c.spacing;
        let r = (d * d + 4.0 * c.l_c * c.l_c).sqrt();
        4.0 * c.l_c * c.l_c * (like.derivs(d).du / d - unlike.derivs(r).du / r)
    };
    let tail = shell_sum(&c.rule, |m| coef(m) * 4.0 * (0.5 * m as f64 * k).sin().powi(2));
    (4.0 * c.rigidity * (0.5 * k).sin().powi(2) + tail.value) / c.inertia
}

pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 { 0.0 } else { (a - b).abs() / s }
}

/// Per-k `(k, analytic, M₁₁/I₁₁, relative gap)`. The analytic sum is cut at the
/// context's window so both sides sum the same shells.
pub fn twist_oracle_check(ctx: &LinearizationContext, chain: &TwistChain, k_grid: &[f64]) -> Vec<(f64, f64, f64, f64)> {
    let chain = &TwistChain { rule: SumRule::fixed(ctx.window), ..*chain };
    k_grid
        .par_iter()
        .map(|&k| {
            let a = twist_dispersion_analytic(k, chain);
            let p = ctx.stability_matrix(k).m[(0, 0)].re / ctx.elastic.inertia[(0, 0)];
            (k, a, p, relative_deviation(a, p))
        })
        .collect()
}

/// Brute-force Hessian of the pair energy sum over perturbations
/// `σ(s) ↦ σ(s) exp(x_s)`, assembled into the Fourier matrix it induces. Used
/// as an independent reference for the full operator.
pub fn hessian_reference(ctx: &LinearizationContext, k: f64, h: f64) -> CMatrix6 {
    let gen = ctx.generator;
    let env = ctx.environment;
    let mut m = (ctx.elastic.rigidity * (4.0 * (0.5 * k).sin().powi(2))).map(|x| Complex64::new(x, 0.0));
    let pairs: Vec<(Vec3, Vec3, PairParams)> = ctx
        .bouquet
        .nodes
        .iter()
        .flat_map(|a| ctx.bouquet.nodes.iter().map(move |b| (a.offset, b.offset, PairParams::mix(a, b, &env))))
        .collect();
    let g = |x: &Vector6<f64>, y: &Vector6<f64>, xi: &Se3| {
        let left = Se3::exp(&Se3Vector::from_vector6(&-x));
        let right = Se3::exp(&Se3Vector::from_vector6(y));
        let pose = left.mul(xi).mul(&right);
        pairs.iter().map(|(ek, em, p)| p.energy(separation(&pose, ek, em).norm())).sum::<f64>()
    };
    for s in 1..=ctx.window as i64 {
        for off in [s, -s] {
            let xi = gen.pow(off);
            let mut hess = nalgebra::SMatrix::<f64, 12, 12>::zeros();
            let at = |i: usize, si: f64, j: usize, sj: f64| {
                let mut z = nalgebra::SVector::<f64, 12>::zeros();
                z[i] += si;
                z[j] += sj;
                let x = Vector6::from_fn(|r, _| z[r]);
                let y = Vector6::from_fn(|r, _| z[r + 6]);
                g(&x, &y, &xi)
            };
            for i in 0..12 {
                for j in i..12 {
                    let v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
                    hess[(i, j)] = v;
                    hess[(j, i)] = v;
                }
            }
            let ph = Complex64::from_polar(1.0, k * off as f64);
            for r in 0..6 {
                for c in 0..6 {
                    m[(r, c)] += Complex64::new(hess[(r, c)] + hess[(r + 6, c + 6)], 0.0)
                        + ph * hess[(r, c + 6)]
                        + ph.conj() * hess[(r + 6, c)];
                }
            }
        }
    }
    m
}
