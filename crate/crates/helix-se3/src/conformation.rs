//! Discrete helices of bouquets, their energy density, landscapes and 2-helices.
//!
//! A helix of radius `R` and pitch parameter `C` is the curve
//! `(R cos t, R sin t, C t)`; one full turn rises `2πC`. Bouquet `s` sits at
//! `t = sΔt` where `Δt` makes consecutive bases one bond length apart.

use crate::molecule::{Bouquet, Environment, PairParams};
use crate::optimize::{golden_section, gradient, nelder_mead, newton_polish, NelderMeadOptions};
use crate::se3::{axis_angle, rot_z, Mat3, Se3, Vec3};
use crate::sum::{shell_sum, SumRule};
use crate::Error;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// Pairs closer than this are treated as overlapping nodes.
pub const OVERLAP_DISTANCE: f64 = 1e-6;

pub fn helix_point(radius: f64, pitch: f64, t: f64) -> Vec3 {
    let (s, c) = t.sin_cos();
    Vec3::new(radius * c, radius * s, pitch * t)
}

fn validate_shape(radius: f64, pitch: f64) -> Result<(), Error> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("helix radius must be finite and >= 0, got {radius}")));
    }
    if pitch == 0.0 || !pitch.is_finite() {
        return Err(Error::Domain(format!("helix pitch must be finite and nonzero, got {pitch}")));
    }
    Ok(())
}

/// Screw motion carrying the helix point at parameter `τ` to the one at `τ + t`.
pub fn helix_transform(radius: f64, pitch: f64, t: f64) -> Result<Se3, Error> {
    validate_shape(radius, pitch)?;
    Ok(screw(t, pitch * t))
}

fn screw(angle: f64, rise: f64) -> Se3 {
    Se3::new(rot_z(angle), Vec3::new(0.0, 0.0, rise))
}

/// Closed-form rotation by `alpha` about `(0, 2πR, C)/sqrt(4π²R² + C²)`.
pub fn bouquet_orientation(radius: f64, pitch: f64, alpha: f64) -> Result<Mat3, Error> {
    let n2 = 4.0 * PI * PI * radius * radius + pitch * pitch;
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::Domain("orientation axis is degenerate for R = C = 0".into()));
    }
    let n = n2.sqrt();
    let (s, c) = alpha.sin_cos();
    let p = 2.0 * PI * radius;
    Ok(Mat3::new(
        c,
        -pitch / n * s,
        p / n * s,
        pitch / n * s,
        (p * p + pitch * pitch * c) / n2,
        p * pitch / n2 * (1.0 - c),
        -p / n * s,
        p * pitch / n2 * (1.0 - c),
        (p * p * c + pitch * pitch) / n2,
    ))
}

/// Unit tangent of the helix at `t = 0`.
pub fn helix_tangent(radius: f64, pitch: f64) -> Vec3 {
    Vec3::new(0.0, radius, pitch).normalize()
}

fn chord(radius: f64, pitch: f64, dt: f64) -> f64 {
    (4.0 * radius * radius * (0.5 * dt).sin().powi(2) + pitch * pitch * dt * dt).sqrt()
}

/// Smallest positive angular step whose chord equals `bond`.
pub fn solve_step(radius: f64, pitch: f64, bond: f64) -> Result<f64, Error> {
    validate_shape(radius, pitch)?;
    if !(bond > 0.0) {
        return Err(Error::Domain(format!("bond length must be positive, got {bond}")));
    }
    if radius == 0.0 {
        return Ok(bond / pitch.abs());
    }
    let hi = bond / pitch.abs();
    let n = 1024;
    let mut lo = 0.0;
    let mut up = hi;
    for i in 1..=n {
        let t = hi * i as f64 / n as f64;
        if chord(radius, pitch, t) >= bond {
            up = t;
            break;
        }
        lo = t;
    }
    while up - lo > 1e-14 * up.max(1.0) {
        let mid = 0.5 * (lo + up);
        if mid <= lo || mid >= up {
            break;
        }
        if chord(radius, pitch, mid) < bond {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Ok(0.5 * (lo + up))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixSpec {
    pub radius: f64,
    pub pitch: f64,
    pub alpha: f64,
    pub step: f64,
    pub bond: f64,
}

impl HelixSpec {
    pub fn new(radius: f64, pitch: f64, alpha: f64, bond: f64) -> Result<Self, Error> {
        let step = solve_step(radius, pitch, bond)?;
        Ok(HelixSpec { radius, pitch, alpha, step, bond })
    }

    pub fn base_point(&self, s: i64) -> Vec3 {
        helix_point(self.radius, self.pitch, s as f64 * self.step)
    }

    /// Twist about the true tangent of this parameterization.
    pub fn orientation(&self) -> Mat3 {
        bouquet_orientation(self.radius, TAU * self.pitch, self.alpha).expect("pitch is nonzero")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conformation {
    pub helix: HelixSpec,
    pub bouquet: Bouquet,
    /// One-step element `a` with `Ξ(s, s′) = a^{s′−s}`.
    pub generator: Se3,
    pub orientation: Mat3,
    /// World frame of bouquet 0; bouquet `s` sits at `placement · a^s`.
    pub placement: Se3,
}

pub fn build_conformation(helix: HelixSpec, bouquet: Bouquet) -> Result<Conformation, Error> {
    validate_shape(helix.radius, helix.pitch)?;
    let orientation = helix.orientation();
    let placement = Se3::new(orientation, helix.base_point(0));
    let step = screw(helix.step, helix.pitch * helix.step);
    let generator = placement.inv().mul(&step).mul(&placement);
    Ok(Conformation { helix, bouquet, generator, orientation, placement })
}

impl Conformation {
    pub fn new(radius: f64, pitch: f64, alpha: f64, bond: f64, bouquet: Bouquet) -> Result<Self, Error> {
        build_conformation(HelixSpec::new(radius, pitch, alpha, bond)?, bouquet)
    }

    fn screw(&self, s: i64) -> Se3 {
        let t = s as f64 * self.helix.step;
        screw(t, self.helix.pitch * t)
    }

    /// World frame `σ(s)`.
    pub fn frame(&self, s: i64) -> Se3 {
        self.screw(s).mul(&self.placement)
    }

    /// `Ξ(0, s) = a^s`, evaluated without accumulating products.
    pub fn xi(&self, s: i64) -> Se3 {
        self.placement.inv().mul(&self.screw(s)).mul(&self.placement)
    }

    pub fn charge_position(&self, s: i64, k: usize) -> Result<Vec3, Error> {
        let node = self.bouquet.nodes.get(k).ok_or_else(|| Error::Domain(format!("no node {k}")))?;
        Ok(self.frame(s).act(&node.offset))
    }

    /// `|κ + ξη_m − η_k|` with `(ξ, κ) = Ξ(s, s′)`.
    pub fn relative_distance(&self, s: i64, s2: i64, k: usize, m: usize) -> Result<f64, Error> {
        let n = &self.bouquet.nodes;
        let (ek, em) = match (n.get(k), n.get(m)) {
            (Some(a), Some(b)) => (a.offset, b.offset),
            _ => return Err(Error::Domain("node index out of range".into())),
        };
        Ok(separation(&self.xi(s2 - s), &ek, &em).norm())
    }

    pub fn assembly(&self) -> HelicalAssembly {
        HelicalAssembly {
            screw_angle: self.helix.step,
            screw_rise: self.helix.pitch * self.helix.step,
            frames: vec![self.placement],
            bouquet: self.bouquet.clone(),
        }
    }
}

/// Body-frame separation `κ + ξη_m − η_k` between node `k` of one bouquet
/// and node `m` of another at relative pose `Ξ = (ξ, κ)`.
pub fn separation(xi: &Se3, ek: &Vec3, em: &Vec3) -> Vec3 {
    xi.trans + xi.rot * em - ek
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions {
    pub twist_penalty: bool,
    pub sum: SumRule,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions { twist_penalty: true, sum: SumRule::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub total: f64,
    pub nonlocal: f64,
    pub elastic: f64,
    pub shells: usize,
    pub converged: bool,
    pub diverged: bool,
}

/// A helix whose repeating unit holds several bouquets at fixed world frames.
/// Unit `n` is the image of unit 0 under the screw `(nθ, n·rise)` about z.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicalAssembly {
    pub screw_angle: f64,
    pub screw_rise: f64,
    pub frames: Vec<Se3>,
    pub bouquet: Bouquet,
}

impl HelicalAssembly {
    pub fn screw(&self, n: i64) -> Se3 {
        screw(n as f64 * self.screw_angle, n as f64 * self.screw_rise)
    }

    /// Frame of bouquet `i` in unit `n`.
    pub fn frame(&self, n: i64, i: usize) -> Se3 {
        self.screw(n).mul(&self.frames[i])
    }

    /// Relative pose of bouquet `j` in unit `n` seen from bouquet `i` in unit 0.
    pub fn xi(&self, i: usize, j: usize, n: i64) -> Se3 {
        self.frames[i].inv().mul(&self.screw(n)).mul(&self.frames[j])
    }

    /// Sequential index along the centerline: bouquet `p` is `frames[p mod N]` of unit `⌊p/N⌋`.
    fn frame_seq(&self, p: i64) -> Se3 {
        let n = self.frames.len() as i64;
        self.frame(p.div_euclid(n), p.rem_euclid(n) as usize)
    }

    fn pair_table(&self, env: &Environment) -> Vec<PairParams> {
        let nodes = &self.bouquet.nodes;
        let mut t = Vec::with_capacity(nodes.len() * nodes.len());
        for a in nodes {
            for b in nodes {
                t.push(PairParams::mix(a, b, env));
            }
        }
        t
    }

    fn pose_energy(&self, table: &[PairParams], xi: &Se3) -> (f64, bool) {
        let nodes = &self.bouquet.nodes;
        let nn = nodes.len();
        let mut e = 0.0;
        let mut overlap = false;
        for (k, nk) in nodes.iter().enumerate() {
            for (m, nm) in nodes.iter().enumerate() {
                let p = &table[k * nn + m];
                if p.is_null() {
                    continue;
                }
                let d = separation(xi, &nk.offset, &nm.offset).norm();
                if d < OVERLAP_DISTANCE {
                    overlap = true;
                    continue;
                }
                e += p.energy(d);
            }
        }
        (e, overlap)
    }

    /// Per-bouquet sum over all ordered node pairs between distinct bouquets.
    pub fn nonlocal_energy(&self, env: &Environment, rule: &SumRule) -> EnergyReport {
        let table = self.pair_table(env);
        let nf = self.frames.len();
        let mut overlap = false;
        let mut inner = 0.0;
        for i in 0..nf {
            for j in 0..nf {
                if i != j {
                    let (e, o) = self.pose_energy(&table, &self.xi(i, j, 0));
                    inner += e;
                    overlap |= o;
                }
            }
        }
        let outer = shell_sum(rule, |s| {
            let mut e = 0.0;
            for i in 0..nf {
                for j in 0..nf {
                    for n in [s as i64, -(s as i64)] {
                        let (v, o) = self.pose_energy(&table, &self.xi(i, j, n));
                        e += v;
                        overlap |= o;
                    }
                }
            }
            e
        });
        let nonlocal = (inner + outer.value) / nf as f64;
        EnergyReport {
            total: nonlocal,
            nonlocal,
            elastic: 0.0,
            shells: outer.shells,
            converged: outer.converged,
            diverged: overlap,
        }
    }

    /// Mean of `½Δφ²` over centerline vertices plus, optionally, `½τ²` over bonds,
    /// in units of the bend rigidity.
    pub fn elastic_energy(&self, twist_penalty: bool) -> f64 {
        let nf = self.frames.len() as i64;
        let base = |p: i64| self.frame_seq(p).trans;
        let mut e = 0.0;
        for p in 0..nf {
            let e_prev = base(p) - base(p - 1);
            let e_next = base(p + 1) - base(p);
            let bend = turning_angle(&e_prev, &e_next);
            e += 0.5 * bend * bend;
            if twist_penalty {
                let e_after = base(p + 2) - base(p + 1);
                let r = self.frame_seq(p + 1).rot * self.frame_seq(p).rot.transpose();
                let excess = minimal_rotation(&e_next, &e_after).transpose() * r;
                let tau = rotation_angle(&excess);
                e += 0.5 * tau * tau;
            }
        }
        e / nf as f64
    }

    pub fn energy(&self, env: &Environment, opts: &EnergyOptions) -> EnergyReport {
        let mut r = self.nonlocal_energy(env, &opts.sum);
        r.elastic = self.elastic_energy(opts.twist_penalty);
        r.total = if r.diverged { f64::INFINITY } else { r.nonlocal + r.elastic };
        r
    }
}

pub fn turning_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Rotation angle in `[0, π]`, accurate near zero.
pub fn rotation_angle(r: &Mat3) -> f64 {
    let s = crate::se3::vee(&(r - r.transpose())).norm() * 0.5;
    let c = 0.5 * (r.trace() - 1.0);
    s.atan2(c)
}

/// Smallest rotation taking the direction of `a` to that of `b`.
pub fn minimal_rotation(a: &Vec3, b: &Vec3) -> Mat3 {
    let axis = a.cross(b);
    let n = axis.norm();
    let angle = n.atan2(a.dot(b));
    if n < 1e-300 {
        if angle.abs() < 1.0 {
            return Mat3::identity();
        }
        let mut perp = a.cross(&Vec3::x());
        if perp.norm() < 1e-8 * a.norm() {
            perp = a.cross(&Vec3::y());
        }
        return axis_angle(&perp.normalize(), PI);
    }
    axis_angle(&(axis / n), angle)
}

pub fn energy_per_bouquet(conf: &Conformation, env: &Environment, opts: &EnergyOptions) -> EnergyReport {
    conf.assembly().energy(env, opts)
}

/// Energy of the helix `(R, C, α)` with `bond`-spaced bouquets; infinite when the
/// shape is invalid or nodes overlap.
pub fn helix_energy(bouquet: &Bouquet, env: &Environment, opts: &EnergyOptions, x: [f64; 3], bond: f64) -> EnergyReport {
    match Conformation::new(x[0], x[1], x[2], bond, bouquet.clone()) {
        Ok(c) => energy_per_bouquet(&c, env, opts),
        Err(_) => EnergyReport {
            total: f64::INFINITY,
            nonlocal: f64::INFINITY,
            elastic: f64::INFINITY,
            shells: 0,
            converged: false,
            diverged: true,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeSpec {
    pub r_axis: Vec<f64>,
    pub c_axis: Vec<f64>,
    pub alpha_samples: usize,
    pub bond: f64,
    pub options: EnergyOptions,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub r_values: Vec<f64>,
    pub c_values: Vec<f64>,
    pub alpha_samples: usize,
    /// Row-major in `(R, C)`; `+∞` marks diverged cells.
    pub energy: Vec<f64>,
    pub argmin_alpha: Vec<f64>,
    pub diverged: Vec<bool>,
}

impl LandscapeGrid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.c_values.len() + j
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.energy[self.index(i, j)]
    }
}

/// Global-then-local minimum of a 2π-periodic function: uniform samples, then
/// golden-section on the bracketing samples to `1e-10`.
pub fn minimize_alpha(f: impl Fn(f64) -> f64, samples: usize) -> (f64, f64) {
    let samples = samples.max(3);
    let h = TAU / samples as f64;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..samples {
        let a = i as f64 * h;
        let v = f(a);
        if v < best.1 {
            best = (a, v);
        }
    }
    if !best.1.is_finite() {
        return best;
    }
    let (a, v) = golden_section(&f, best.0 - h, best.0 + h, 1e-10);
    let out = if v <= best.1 { (a, v) } else { best };
    (out.0.rem_euclid(TAU), out.1)
}

pub fn landscape_scan(bouquet: &Bouquet, env: &Environment, spec: &LandscapeSpec) -> Result<LandscapeGrid, Error> {
    if spec.r_axis.is_empty() || spec.c_axis.is_empty() {
        return Err(Error::Domain("landscape axes must be nonempty".into()));
    }
    if spec.c_axis.iter().any(|&c| c == 0.0) {
        return Err(Error::Domain("the pitch axis must exclude 0".into()));
    }
    let nc = spec.c_axis.len();
    let cells: Vec<(f64, f64, bool)> = (0..spec.r_axis.len() * nc)
        .into_par_iter()
        .map(|idx| {
            let (r, c) = (spec.r_axis[idx / nc], spec.c_axis[idx % nc]);
            let f = |a: f64| helix_energy(bouquet, env, &spec.options, [r, c, a], spec.bond).total;
            let (a, e) = minimize_alpha(f, spec.alpha_samples);
            (a, e, !e.is_finite())
        })
        .collect();
    Ok(LandscapeGrid {
        r_values: spec.r_axis.clone(),
        c_values: spec.c_axis.clone(),
        alpha_samples: spec.alpha_samples,
        energy: cells.iter().map(|c| if c.2 { f64::INFINITY } else { c.1 }).collect(),
        argmin_alpha: cells.iter().map(|c| c.0).collect(),
        diverged: cells.iter().map(|c| c.2).collect(),
    })
}

/// Interior cells strictly below all eight neighbours; diverged cells count as `+∞`.
pub fn grid_minima(grid: &LandscapeGrid) -> Vec<(usize, usize)> {
    let (nr, nc) = (grid.r_values.len(), grid.c_values.len());
    let mut out = vec![];
    for i in 1..nr.saturating_sub(1) {
        for j in 1..nc.saturating_sub(1) {
            let e = grid.at(i, j);
            if !e.is_finite() {
                continue;
            }
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (a, b) = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    if grid.at(a, b) <= e {
                        is_min = false;
                    }
                }
            }
            if is_min {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub radius: f64,
    pub pitch: f64,
    pub alpha: f64,
    pub energy: f64,
    pub gradient_norm: f64,
}

/// Finite-difference step for stationarity checks.
pub const GRADIENT_STEP: f64 = 1e-5;

/// Energy with the lattice window frozen at the shell count chosen at `x`, so
/// that nearby evaluations are smooth functions of the parameters.
pub fn frozen_energy<'a>(
    f: impl Fn(&[f64], &SumRule) -> EnergyReport + 'a,
    x: &[f64],
    opts: &EnergyOptions,
) -> (EnergyReport, impl Fn(&[f64]) -> f64 + 'a) {
    let r = f(x, &opts.sum);
    let rule = if opts.sum.is_fixed() { opts.sum } else { SumRule::fixed(r.shells) };
    (r, move |y: &[f64]| f(y, &rule).total)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Central-difference gradient of the energy density in `(R, C, α)`.
pub fn stationarity_check(conf: &Conformation, env: &Environment, opts: &EnergyOptions) -> [f64; 3] {
    let h = &conf.helix;
    let b = conf.bouquet.clone();
    let bond = h.bond;
    let eval = move |y: &[f64], rule: &SumRule| {
        let o = EnergyOptions { sum: *rule, ..*opts };
        helix_energy(&b, env, &o, [y[0], y[1], y[2]], bond)
    };
    let x = [h.radius, h.pitch, h.alpha];
    let (_, f) = frozen_energy(eval, &x, opts);
    let g = gradient(&f, &x, GRADIENT_STEP);
    [g[0], g[1], g[2]]
}

/// Local minimization in `(R, C, α)` from `x0`: simplex search, then Newton steps
/// on a frozen lattice window.
pub fn refine_helix(bouquet: &Bouquet, env: &Environment, opts: &EnergyOptions, x0: [f64; 3], bond: f64) -> Minimum {
    let obj = |y: &[f64]| {
        if y[0] < 0.0 {
            return f64::INFINITY;
        }
        helix_energy(bouquet, env, opts, [y[0], y[1], y[2]], bond).total
    };
    let nm = nelder_mead(&obj, &x0, &[0.05, 0.05, 0.05], &NelderMeadOptions::default());
    polish(bouquet, env, opts, nm.x, bond)
}

fn polish(bouquet: &Bouquet, env: &Environment, opts: &EnergyOptions, x: Vec<f64>, bond: f64) -> Minimum {
    let eval = |y: &[f64], rule: &SumRule| {
        let o = EnergyOptions { sum: *rule, ..*opts };
        helix_energy(bouquet, env, &o, [y[0], y[1], y[2]], bond)
    };
    let (_, f) = frozen_energy(eval, &x, opts);
    let x = newton_polish(&f, &x, 1e-8, 30);
    let (r, f) = frozen_energy(eval, &x, opts);
    let g = gradient(&f, &x, GRADIENT_STEP);
    Minimum {
        radius: x[0],
        pitch: x[1],
        alpha: x[2].rem_euclid(TAU),
        energy: r.total,
        gradient_norm: norm(&g),
    }
}

/// Grid minima refined to stationary helices; only those reaching a gradient
/// norm below `tol` are returned.
pub fn find_minima(
    grid: &LandscapeGrid,
    bouquet: &Bouquet,
    env: &Environment,
    opts: &EnergyOptions,
    bond: f64,
    tol: f64,
) -> Vec<Minimum> {
    let seeds = grid_minima(grid);
    let mut found: Vec<Minimum> = seeds
        .par_iter()
        .map(|&(i, j)| {
            let x0 = [grid.r_values[i], grid.c_values[j], grid.argmin_alpha[grid.index(i, j)]];
            refine_helix(bouquet, env, opts, x0, bond)
        })
        .filter(|m| m.gradient_norm < tol && m.energy.is_finite())
        .collect();
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    found
}

/// Relative pose of the second bouquet of a 2-helix, measured from the position
/// it would take in the plain helix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHelixParams {
    pub radius: f64,
    pub pitch: f64,
    pub alpha: f64,
    pub shift: f64,
    pub azimuth: f64,
    pub twist: f64,
}

impl TwoHelixParams {
    pub fn from_slice(x: &[f64]) -> Self {
        TwoHelixParams { radius: x[0], pitch: x[1], alpha: x[2], shift: x[3], azimuth: x[4], twist: x[5] }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.radius, self.pitch, self.alpha, self.shift, self.azimuth, self.twist]
    }

    pub fn degenerate(radius: f64, pitch: f64, alpha: f64) -> Self {
        TwoHelixParams { radius, pitch, alpha, shift: 0.0, azimuth: 0.0, twist: 0.0 }
    }
}

/// Unit of two bouquets repeated by the two-step screw of the `(R, C)` helix.
pub fn two_helix_assembly(bouquet: &Bouquet, p: &TwoHelixParams, bond: f64) -> Result<HelicalAssembly, Error> {
    let h = HelixSpec::new(p.radius, p.pitch, p.alpha, bond)?;
    let first = Se3::new(h.orientation(), h.base_point(0));
    let second_helix = HelixSpec { alpha: p.alpha + p.twist, ..h };
    let t = h.step + p.azimuth;
    let lift = Se3::new(rot_z(t), Vec3::new(0.0, 0.0, h.pitch * t + p.shift));
    let second = lift.mul(&Se3::new(second_helix.orientation(), h.base_point(0)));
    Ok(HelicalAssembly {
        screw_angle: 2.0 * h.step,
        screw_rise: 2.0 * h.pitch * h.step,
        frames: vec![first, second],
        bouquet: bouquet.clone(),
    })
}

pub fn two_helix_energy(bouquet: &Bouquet, env: &Environment, opts: &EnergyOptions, p: &TwoHelixParams, bond: f64) -> EnergyReport {
    match two_helix_assembly(bouquet, p, bond) {
        Ok(a) => a.energy(env, opts),
        Err(_) => EnergyReport {
            total: f64::INFINITY,
            nonlocal: f64::INFINITY,
            elastic: f64::INFINITY,
            shells: 0,
            converged: false,
            diverged: true,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoHelixResult {
    pub params: TwoHelixParams,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Local minimization over the helix shape and the relative pose; `frozen`
/// pins the pose at its initial value.
pub fn two_helix_optimize(
    bouquet: &Bouquet,
    env: &Environment,
    opts: &EnergyOptions,
    initial: &TwoHelixParams,
    bond: f64,
    frozen: bool,
    max_iter: usize,
) -> TwoHelixResult {
    let base = initial.to_vec();
    let dim = if frozen { 3 } else { 6 };
    let expand = |y: &[f64]| {
        let mut v = base.clone();
        v[..dim].copy_from_slice(&y[..dim]);
        v
    };
    let obj = |y: &[f64]| {
        let v = expand(y);
        if v[0] < 0.0 {
            return f64::INFINITY;
        }
        two_helix_energy(bouquet, env, opts, &TwoHelixParams::from_slice(&v), bond).total
    };
    let nm_opts = NelderMeadOptions { max_iter, ..NelderMeadOptions::default() };
    let nm = nelder_mead(&obj, &base[..dim], &vec![0.05; dim], &nm_opts);
    let eval = |y: &[f64], rule: &SumRule| {
        let o = EnergyOptions { sum: *rule, ..*opts };
        two_helix_energy(bouquet, env, &o, &TwoHelixParams::from_slice(&expand(y)), bond)
    };
    let (_, f) = frozen_energy(eval, &nm.x, opts);
    let x = newton_polish(&f, &nm.x, 1e-8, 30);
    let (r, f) = frozen_energy(eval, &x, opts);
    let g = gradient(&f, &x, GRADIENT_STEP);
    TwoHelixResult {
        params: TwoHelixParams::from_slice(&expand(&x)),
        energy: r.total,
        gradient_norm: norm(&g),
        iterations: nm.iterations,
        converged: nm.converged,
    }
}
