//! Run configuration: flat `key = value` lines grouped under `[section]` headers.
//!
//! `#` starts a comment. Values are whitespace-separated tokens. Only `node` may
//! repeat. Unknown sections or keys are rejected.

use crate::molecule::{
    Bouquet, BouquetNode, ElasticModel, Environment, UnitSystem, DEFAULT_EPS_R, DEFAULT_MU,
    DEFAULT_TEMPERATURE,
};
use crate::se3::Vec3;
use crate::sum::SumRule;
use crate::Error;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSpec {
    /// Å, body frame.
    pub offset: [f64; 3],
    /// Elementary charges.
    pub charge_e: f64,
    /// Å.
    pub lj_radius: f64,
    /// Units of μ.
    pub lj_depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseState {
    Straight,
    Helix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub nodes: Vec<NodeSpec>,
    pub ionic_strength: f64,
    pub relative_permittivity: f64,
    pub temperature: f64,
    pub mu_joule: f64,
    pub mass_amu: f64,
    pub rigidity: [f64; 6],
    pub inertia: [f64; 6],
    pub bond: f64,
    pub twist_penalty: bool,
    pub sum: SumRule,
    pub helix: [f64; 3],
    pub r_range: (f64, f64, usize),
    pub c_range: (f64, f64, usize),
    pub alpha_samples: usize,
    pub gradient_tolerance: f64,
    pub landscape_csv: Option<String>,
    pub base: BaseState,
    pub k_points: usize,
    pub full_period: bool,
    pub chain_lengths: Vec<usize>,
    pub ionic_strengths: Vec<f64>,
    pub bracket: Option<(f64, f64)>,
    pub two_helix_initial: Option<[f64; 6]>,
    pub max_iter: usize,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nodes: vec![],
            ionic_strength: 0.01,
            relative_permittivity: DEFAULT_EPS_R,
            temperature: DEFAULT_TEMPERATURE,
            mu_joule: DEFAULT_MU,
            mass_amu: 12.011,
            rigidity: [1.0; 6],
            inertia: [1.0; 6],
            bond: 1.0,
            twist_penalty: true,
            sum: SumRule::default(),
            helix: [0.0, 1.0, 0.0],
            r_range: (0.0, 20.0, 256),
            c_range: (0.25, 20.0, 256),
            alpha_samples: 64,
            gradient_tolerance: 1e-6,
            landscape_csv: None,
            base: BaseState::Straight,
            k_points: 512,
            full_period: false,
            chain_lengths: vec![],
            ionic_strengths: vec![],
            bracket: None,
            two_helix_initial: None,
            max_iter: 20_000,
            strict: false,
        }
    }
}

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn scalars<T: FromStr>(line: usize, key: &str, toks: &[&str], n: usize) -> Result<Vec<T>, Error> {
    if toks.len() != n {
        return Err(err(line, format!("`{key}` expects {n} value(s), got {}", toks.len())));
    }
    toks.iter()
        .map(|t| t.parse::<T>().map_err(|_| err(line, format!("`{key}`: cannot parse `{t}`"))))
        .collect()
}

fn list<T: FromStr>(line: usize, key: &str, toks: &[&str]) -> Result<Vec<T>, Error> {
    scalars(line, key, toks, toks.len())
}

fn finite(line: usize, key: &str, v: &[f64]) -> Result<(), Error> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(err(line, format!("`{key}` must be finite")))
    }
}

fn f1(line: usize, key: &str, toks: &[&str]) -> Result<f64, Error> {
    let v = scalars::<f64>(line, key, toks, 1)?;
    finite(line, key, &v)?;
    Ok(v[0])
}

fn u1(line: usize, key: &str, toks: &[&str]) -> Result<usize, Error> {
    Ok(scalars::<usize>(line, key, toks, 1)?[0])
}

fn b1(line: usize, key: &str, toks: &[&str]) -> Result<bool, Error> {
    Ok(scalars::<bool>(line, key, toks, 1)?[0])
}

fn fixed<const N: usize>(line: usize, key: &str, toks: &[&str]) -> Result<[f64; N], Error> {
    let v = scalars::<f64>(line, key, toks, N)?;
    finite(line, key, &v)?;
    Ok(std::array::from_fn(|i| v[i]))
}

fn range(line: usize, key: &str, toks: &[&str]) -> Result<(f64, f64, usize), Error> {
    if toks.len() != 3 {
        return Err(err(line, format!("`{key}` expects `min max points`")));
    }
    let lo = f1(line, key, &toks[..1])?;
    let hi = f1(line, key, &toks[1..2])?;
    let n = u1(line, key, &toks[2..])?;
    if hi < lo || n == 0 {
        return Err(err(line, format!("`{key}` needs min ≤ max and at least one point")));
    }
    Ok((lo, hi, n))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut c = RunConfig::default();
        let mut section = String::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(line, format!("unknown section `[{name}]`")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| err(line, "expected `key = value`"))?;
            let key = key.trim();
            let toks: Vec<&str> = value.split_whitespace().collect();
            let full = format!("{section}.{key}");
            if full != "bouquet.node" && !seen.insert(full.clone()) {
                return Err(err(line, format!("duplicate key `{full}`")));
            }
            c.set(line, &section, key, &toks)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, line: usize, section: &str, key: &str, t: &[&str]) -> Result<(), Error> {
        match (section, key) {
            ("bouquet", "node") => {
                let v = fixed::<6>(line, key, t)?;
                self.nodes.push(NodeSpec { offset: [v[0], v[1], v[2]], charge_e: v[3], lj_radius: v[4], lj_depth: v[5] });
            }
            ("environment", "ionic_strength") => self.ionic_strength = f1(line, key, t)?,
            ("environment", "relative_permittivity") => self.relative_permittivity = f1(line, key, t)?,
            ("environment", "temperature") => self.temperature = f1(line, key, t)?,
            ("elastic", "mu_joule") => self.mu_joule = f1(line, key, t)?,
            ("elastic", "mass_amu") => self.mass_amu = f1(line, key, t)?,
            ("elastic", "rigidity") => self.rigidity = fixed::<6>(line, key, t)?,
            ("elastic", "inertia") => self.inertia = fixed::<6>(line, key, t)?,
            ("chain", "bond") => self.bond = f1(line, key, t)?,
            ("chain", "twist_penalty") => self.twist_penalty = b1(line, key, t)?,
            ("sum", "tolerance") => self.sum.tolerance = f1(line, key, t)?,
            ("sum", "patience") => self.sum.patience = u1(line, key, t)?,
            ("sum", "max_shells") => self.sum.max_shells = u1(line, key, t)?,
            ("helix", "shape") => self.helix = fixed::<3>(line, key, t)?,
            ("landscape", "radius") => self.r_range = range(line, key, t)?,
            ("landscape", "pitch") => self.c_range = range(line, key, t)?,
            ("landscape", "alpha_samples") => self.alpha_samples = u1(line, key, t)?,
            ("minima", "gradient_tolerance") => self.gradient_tolerance = f1(line, key, t)?,
            ("minima", "landscape_csv") => {
                if t.len() != 1 {
                    return Err(err(line, "`landscape_csv` expects one path without spaces"));
                }
                self.landscape_csv = Some(t[0].to_string());
            }
            ("dispersion", "base") => {
                self.base = match scalars::<String>(line, key, t, 1)?[0].as_str() {
                    "straight" => BaseState::Straight,
                    "helix" => BaseState::Helix,
                    other => return Err(err(line, format!("`base` must be straight or helix, got `{other}`"))),
                }
            }
            ("dispersion", "k_points") => self.k_points = u1(line, key, t)?,
            ("dispersion", "full_period") => self.full_period = b1(line, key, t)?,
            ("dispersion", "chain_lengths") => self.chain_lengths = list(line, key, t)?,
            ("scan", "ionic_strengths") => {
                let v = list::<f64>(line, key, t)?;
                finite(line, key, &v)?;
                self.ionic_strengths = v;
            }
            ("scan", "bracket") => {
                let v = fixed::<2>(line, key, t)?;
                self.bracket = Some((v[0], v[1]));
            }
            ("two_helix", "initial") => self.two_helix_initial = Some(fixed::<6>(line, key, t)?),
            ("two_helix", "max_iter") => self.max_iter = u1(line, key, t)?,
            ("two_helix", "strict") => self.strict = b1(line, key, t)?,
            ("", _) => return Err(err(line, format!("key `{key}` outside any section"))),
            _ => return Err(err(line, format!("unknown key `{key}` in [{section}]"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.nodes.is_empty() {
            return bad("[bouquet] needs at least one `node`");
        }
        if self.bond <= 0.0 {
            return bad("`chain.bond` must be positive");
        }
        if self.k_points == 0 {
            return bad("`dispersion.k_points` must be positive");
        }
        if self.chain_lengths.iter().any(|&n| n < 2) {
            return bad("`dispersion.chain_lengths` entries must be at least 2");
        }
        if self.ionic_strengths.iter().any(|&i| i <= 0.0) {
            return bad("`scan.ionic_strengths` must be positive");
        }
        if let Some((a, b)) = self.bracket {
            if !(a > 0.0 && b > a) {
                return bad("`scan.bracket` needs 0 < low < high");
            }
        }
        if self.sum.max_shells == 0 || self.sum.patience == 0 {
            return bad("`sum.max_shells` and `sum.patience` must be positive");
        }
        if self.alpha_samples < 2 {
            return bad("`landscape.alpha_samples` must be at least 2");
        }
        self.bouquet()?;
        self.environment()?;
        self.elastic()?;
        Ok(())
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::new(self.mu_joule, self.mass_amu)
    }

    pub fn bouquet(&self) -> Result<Bouquet, Error> {
        let u = self.units();
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                BouquetNode::new(
                    Vec3::from(n.offset),
                    u.charge_to_internal(n.charge_e),
                    n.lj_radius,
                    n.lj_depth,
                )
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(e.to_string()))?;
        Bouquet::new(nodes).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn environment(&self) -> Result<Environment, Error> {
        self.environment_at(self.ionic_strength)
    }

    pub fn environment_at(&self, ionic_strength: f64) -> Result<Environment, Error> {
        Environment::new(ionic_strength, self.relative_permittivity, self.temperature)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn elastic(&self) -> Result<ElasticModel, Error> {
        ElasticModel::diagonal(self.rigidity, self.inertia, self.mu_joule).map_err(|e| Error::Config(e.to_string()))
    }

    /// Canonical text form listing every key; parsing it yields `self` again.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let nums = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "[bouquet]");
        for n in &self.nodes {
            let _ = writeln!(
                s,
                "node = {}",
                nums(&[n.offset[0], n.offset[1], n.offset[2], n.charge_e, n.lj_radius, n.lj_depth])
            );
        }
        let _ = writeln!(s, "[environment]");
        let _ = writeln!(s, "ionic_strength = {:?}", self.ionic_strength);
        let _ = writeln!(s, "relative_permittivity = {:?}", self.relative_permittivity);
        let _ = writeln!(s, "temperature = {:?}", self.temperature);
        let _ = writeln!(s, "[elastic]");
        let _ = writeln!(s, "mu_joule = {:?}", self.mu_joule);
        let _ = writeln!(s, "mass_amu = {:?}", self.mass_amu);
        let _ = writeln!(s, "rigidity = {}", nums(&self.rigidity));
        let _ = writeln!(s, "inertia = {}", nums(&self.inertia));
        let _ = writeln!(s, "[chain]");
        let _ = writeln!(s, "bond = {:?}", self.bond);
        let _ = writeln!(s, "twist_penalty = {}", self.twist_penalty);
        let _ = writeln!(s, "[sum]");
        let _ = writeln!(s, "tolerance = {:?}", self.sum.tolerance);
        let _ = writeln!(s, "patience = {}", self.sum.patience);
        let _ = writeln!(s, "max_shells = {}", self.sum.max_shells);
        let _ = writeln!(s, "[helix]");
        let _ = writeln!(s, "shape = {}", nums(&self.helix));
        let _ = writeln!(s, "[landscape]");
        let (a, b, n) = self.r_range;
        let _ = writeln!(s, "radius = {a:?} {b:?} {n}");
        let (a, b, n) = self.c_range;
        let _ = writeln!(s, "pitch = {a:?} {b:?} {n}");
        let _ = writeln!(s, "alpha_samples = {}", self.alpha_samples);
        let _ = writeln!(s, "[minima]");
        let _ = writeln!(s, "gradient_tolerance = {:?}", self.gradient_tolerance);
        if let Some(p) = &self.landscape_csv {
            let _ = writeln!(s, "landscape_csv = {p}");
        }
        let _ = writeln!(s, "[dispersion]");
        let base = match self.base {
            BaseState::Straight => "straight",
            BaseState::Helix => "helix",
        };
        let _ = writeln!(s, "base = {base}");
        let _ = writeln!(s, "k_points = {}", self.k_points);
        let _ = writeln!(s, "full_period = {}", self.full_period);
        let lens: Vec<String> = self.chain_lengths.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "chain_lengths = {}", lens.join(" "));
        let _ = writeln!(s, "[scan]");
        let _ = writeln!(s, "ionic_strengths = {}", nums(&self.ionic_strengths));
        if let Some((a, b)) = self.bracket {
            let _ = writeln!(s, "bracket = {a:?} {b:?}");
        }
        let _ = writeln!(s, "[two_helix]");
        if let Some(v) = self.two_helix_initial {
            let _ = writeln!(s, "initial = {}", nums(&v));
        }
        let _ = writeln!(s, "max_iter = {}", self.max_iter);
        let _ = writeln!(s, "strict = {}", self.strict);
        s
    }
}

const SECTIONS: &[&str] =
    &["bouquet", "environment", "elastic", "chain", "sum", "helix", "landscape", "minima", "dispersion", "scan", "two_helix"];

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# straight dipole chain
[bouquet]
node = 0 0 1  0.17 1 2.9e-4
node = 0 0 -1 -0.17 1 2.9e-4   # second charge
[environment]
ionic_strength = 0.01
[dispersion]
k_points = 256
chain_lengths = 9 10
";

    #[test]
    fn parses_sample() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.nodes.len(), 2);
        assert_eq!(c.nodes[1].charge_e, -0.17);
        assert_eq!(c.chain_lengths, vec![9, 10]);
        assert_eq!(c.k_points, 256);
        assert_eq!(c.relative_permittivity, 80.0);
    }

    #[test]
    fn echo_round_trips() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        let again = RunConfig::parse(&c.echo()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.echo(), c.echo());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "[bouquet]\nnode = 0 0 1 1 1 0\nfoo = 1\n",
            "[bogus]\n",
            "x = 1\n",
            "[bouquet]\nnode = 0 0 1 1 1\n",
            "[bouquet]\nnode = 0 0 1 1 1 0\n[environment]\nionic_strength = nan\n",
            "[bouquet]\nnode = 0 0 1 1 1 0\n[environment]\nionic_strength = 1\nionic_strength = 2\n",
            "[environment]\nionic_strength = 1\n",
            "[bouquet]\nnode = 0 0 1 1 1 0\n[environment]\nionic_strength = -1\n",
        ] {
            let e = RunConfig::parse(bad).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
    }
}
