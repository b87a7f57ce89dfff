//! Bouquets, pair potentials, electrolyte environment and the internal unit system.
//!
//! Internal units: lengths in ångström, energies in the bend rigidity `μ`,
//! charges in `e* = sqrt(4π ε₀ μ l₀)`. In these units two unit charges one
//! ångström apart interact with energy exactly one.

use crate::se3::Vec3;
use crate::Error;
use nalgebra::Matrix6;

pub const EPSILON_0: f64 = 8.8541878128e-12;
pub const BOLTZMANN: f64 = 1.380649e-23;
pub const AVOGADRO: f64 = 6.02214076e23;
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
pub const ATOMIC_MASS: f64 = 1.66053906660e-27;
pub const ANGSTROM: f64 = 1e-10;

/// Bend rigidity of a carbon-carbon bond, J/rad².
pub const DEFAULT_MU: f64 = 5.022e-19;
pub const DEFAULT_LJ_DEPTH: f64 = 2.90e-4;
pub const DEFAULT_EPS_R: f64 = 80.0;
pub const DEFAULT_TEMPERATURE: f64 = 298.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub length_angstrom: f64,
    pub energy_joule: f64,
    pub mass_kg: f64,
}

impl UnitSystem {
    pub fn new(energy_joule: f64, mass_amu: f64) -> Self {
        UnitSystem { length_angstrom: 1.0, energy_joule, mass_kg: mass_amu * ATOMIC_MASS }
    }

    /// Charge unit as a multiple of `e`.
    pub fn charge_unit(&self) -> f64 {
        (4.0 * std::f64::consts::PI * EPSILON_0 * self.energy_joule * self.length_angstrom * ANGSTROM)
            .sqrt()
            / ELEMENTARY_CHARGE
    }

    /// `l₀ sqrt(m₀/μ)` in seconds.
    pub fn time_unit(&self) -> f64 {
        self.length_angstrom * ANGSTROM * (self.mass_kg / self.energy_joule).sqrt()
    }

    pub fn charge_to_internal(&self, q_e: f64) -> f64 {
        q_e / self.charge_unit()
    }

    pub fn charge_to_physical(&self, q: f64) -> f64 {
        q * self.charge_unit()
    }

    pub fn energy_to_internal(&self, joule: f64) -> f64 {
        joule / self.energy_joule
    }

    pub fn energy_to_physical(&self, e: f64) -> f64 {
        e * self.energy_joule
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem::new(DEFAULT_MU, 12.011)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BouquetNode {
    pub offset: Vec3,
    /// Internal charge units.
    pub charge: f64,
    pub lj_radius: f64,
    /// Internal energy units.
    pub lj_depth: f64,
}

impl BouquetNode {
    pub fn new(offset: Vec3, charge: f64, lj_radius: f64, lj_depth: f64) -> Result<Self, Error> {
        if !offset.iter().all(|x| x.is_finite()) || !charge.is_finite() {
            return Err(Error::Domain("node offset and charge must be finite".into()));
        }
        if lj_depth < 0.0 || !lj_depth.is_finite() {
            return Err(Error::Domain("LJ depth must be finite and non-negative".into()));
        }
        if lj_depth > 0.0 && !(lj_radius > 0.0) {
            return Err(Error::Domain("LJ radius must be positive when the depth is".into()));
        }
        Ok(BouquetNode { offset, charge, lj_radius, lj_depth })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bouquet {
    pub nodes: Vec<BouquetNode>,
}

impl Bouquet {
    pub fn new(nodes: Vec<BouquetNode>) -> Result<Self, Error> {
        if nodes.is_empty() {
            return Err(Error::Domain("a bouquet needs at least one node".into()));
        }
        Ok(Bouquet { nodes })
    }

    /// Two opposite charges `±q` at `±l_c` along `axis`, sharing LJ parameters.
    pub fn dipole(axis: Vec3, l_c: f64, q: f64, lj_radius: f64, lj_depth: f64) -> Self {
        let n = axis.normalize() * l_c;
        Bouquet {
            nodes: vec![
                BouquetNode { offset: n, charge: q, lj_radius, lj_depth },
                BouquetNode { offset: -n, charge: -q, lj_radius, lj_depth },
            ],
        }
    }

    pub fn scaled_charges(&self, f: f64) -> Self {
        let mut b = self.clone();
        b.nodes.iter_mut().for_each(|n| n.charge *= f);
        b
    }

    pub fn without_lj(&self) -> Self {
        let mut b = self.clone();
        b.nodes.iter_mut().for_each(|n| n.lj_depth = 0.0);
        b
    }

    pub fn is_inert(&self) -> bool {
        self.nodes.iter().all(|n| n.charge == 0.0 && n.lj_depth == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub ionic_strength: f64,
    pub relative_permittivity: f64,
    pub temperature: f64,
    /// Å.
    pub debye_length: f64,
}

impl Environment {
    pub fn new(ionic_strength: f64, relative_permittivity: f64, temperature: f64) -> Result<Self, Error> {
        let debye_length = debye_length(ionic_strength, relative_permittivity, temperature)?;
        Ok(Environment { ionic_strength, relative_permittivity, temperature, debye_length })
    }

    pub fn water(ionic_strength: f64) -> Result<Self, Error> {
        Self::new(ionic_strength, DEFAULT_EPS_R, DEFAULT_TEMPERATURE)
    }
}

/// Debye screening length in Å for ionic strength `i` in mol/L.
pub fn debye_length(i: f64, eps_r: f64, t: f64) -> Result<f64, Error> {
    if !(i > 0.0 && eps_r > 0.0 && t > 0.0) || !(i.is_finite() && eps_r.is_finite() && t.is_finite()) {
        return Err(Error::Domain(format!(
            "Debye length needs positive finite inputs (I={i}, eps_r={eps_r}, T={t})"
        )));
    }
    let per_m3 = i * 1000.0;
    let l = (EPSILON_0 * eps_r * BOLTZMANN * t / (2.0 * AVOGADRO * ELEMENTARY_CHARGE.powi(2) * per_m3)).sqrt();
    Ok(l / ANGSTROM)
}

fn check_distance(d: f64) -> Result<(), Error> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("pair distance must be positive, got {d}")))
    }
}

/// `qᵢqⱼ e^{−d/λ}/d`; `λ = ∞` disables screening and `λ = 0` screens fully.
pub fn coulomb_screened(d: f64, qi: f64, qj: f64, lambda: f64) -> Result<f64, Error> {
    check_distance(d)?;
    if qi == 0.0 || qj == 0.0 {
        return Ok(0.0);
    }
    Ok(qi * qj * (-d / lambda).exp() / d)
}

const LJ_SHIFT: f64 = 2.0 / 729.0 - 1.0 / 531_441.0;

/// Lennard-Jones with minimum `−ε` at `d₀`, shifted to vanish at `3d₀` and cut there.
pub fn lennard_jones(d: f64, d0: f64, eps: f64) -> Result<f64, Error> {
    check_distance(d)?;
    if eps == 0.0 || d >= 3.0 * d0 {
        return Ok(0.0);
    }
    let s6 = (d0 / d).powi(6);
    Ok(eps * (s6 * s6 - 2.0 * s6 + LJ_SHIFT))
}

pub fn elastic_energy(dphi: f64, mu: f64) -> f64 {
    0.5 * mu * dphi * dphi
}

/// Parameters of one node pair after mixing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairParams {
    pub qq: f64,
    pub lambda: f64,
    pub d0: f64,
    pub eps: f64,
}

/// Value, first and second radial derivatives of a pair potential, and
/// `Q = U′/d`, `Q′ = dQ/dd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDerivs {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub q: f64,
    pub dq: f64,
}

impl PairParams {
    /// Arithmetic mean of radii, geometric mean of depths.
    pub fn mix(a: &BouquetNode, b: &BouquetNode, env: &Environment) -> Self {
        PairParams {
            qq: a.charge * b.charge,
            lambda: env.debye_length,
            d0: 0.5 * (a.lj_radius + b.lj_radius),
            eps: (a.lj_depth * b.lj_depth).sqrt(),
        }
    }

    pub fn is_null(&self) -> bool {
        self.qq == 0.0 && self.eps == 0.0
    }

    pub fn energy(&self, d: f64) -> f64 {
        let mut u = 0.0;
        if self.qq != 0.0 {
            u += self.qq * (-d / self.lambda).exp() / d;
        }
        if self.eps != 0.0 && d < 3.0 * self.d0 {
            let s6 = (self.d0 / d).powi(6);
            u += self.eps * (s6 * s6 - 2.0 * s6 + LJ_SHIFT);
        }
        u
    }

    pub fn derivs(&self, d: f64) -> PairDerivs {
        let (mut u, mut du, mut d2u) = (0.0, 0.0, 0.0);
        if self.qq != 0.0 {
            let l = self.lambda;
            let c = self.qq * (-d / l).exp();
            let inv_l = if l.is_infinite() { 0.0 } else { 1.0 / l };
            u += c / d;
            du -= c * (1.0 / (d * d) + inv_l / d);
            d2u += c * (2.0 / (d * d * d) + 2.0 * inv_l / (d * d) + inv_l * inv_l / d);
        }
        if self.eps != 0.0 && d < 3.0 * self.d0 {
            let s6 = (self.d0 / d).powi(6);
            let s12 = s6 * s6;
            u += self.eps * (s12 - 2.0 * s6 + LJ_SHIFT);
            du += self.eps * 12.0 * (s6 - s12) / d;
            d2u += self.eps * (156.0 * s12 - 84.0 * s6) / (d * d);
        }
        let q = du / d;
        PairDerivs { u, du, d2u, q, dq: (d2u - q) / d }
    }
}

/// Combined Coulomb and LJ energy of two nodes at distance `d`.
pub fn pair_potential(d: f64, a: &BouquetNode, b: &BouquetNode, env: &Environment) -> Result<f64, Error> {
    check_distance(d)?;
    Ok(PairParams::mix(a, b, env).energy(d))
}

pub fn pair_potential_derivatives(
    d: f64,
    a: &BouquetNode,
    b: &BouquetNode,
    env: &Environment,
) -> Result<PairDerivs, Error> {
    check_distance(d)?;
    Ok(PairParams::mix(a, b, env).derivs(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticModel {
    pub rigidity: Matrix6<f64>,
    pub inertia: Matrix6<f64>,
    pub mu_joule: f64,
}

impl ElasticModel {
    pub fn new(rigidity: Matrix6<f64>, inertia: Matrix6<f64>, mu_joule: f64) -> Result<Self, Error> {
        for (name, m) in [("rigidity", &rigidity), ("inertia", &inertia)] {
            if (m - m.transpose()).amax() > 1e-14 * m.amax().max(1.0) {
                return Err(Error::Domain(format!("{name} matrix is not symmetric")));
            }
            if m.cholesky().is_none() {
                return Err(Error::Domain(format!("{name} matrix is not positive definite")));
            }
        }
        Ok(ElasticModel { rigidity, inertia, mu_joule })
    }

    /// `J = I₀ = Id` in internal units.
    pub fn normalized() -> Self {
        ElasticModel { rigidity: Matrix6::identity(), inertia: Matrix6::identity(), mu_joule: DEFAULT_MU }
    }

    pub fn diagonal(j: [f64; 6], i0: [f64; 6], mu_joule: f64) -> Result<Self, Error> {
        let j = Matrix6::from_diagonal(&j.into());
        let i0 = Matrix6::from_diagonal(&i0.into());
        Self::new(j, i0, mu_joule)
    }
}
