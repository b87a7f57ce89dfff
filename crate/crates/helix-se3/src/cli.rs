//! Command dispatch for the `helix-se3` binary.

use crate::config::{BaseState, RunConfig};
use crate::conformation::{
    find_minima, landscape_scan, linspace, refine_helix, two_helix_optimize, Conformation, EnergyOptions,
    LandscapeGrid, LandscapeSpec, TwoHelixParams,
};
use crate::output::{format_number, Cell, ResultTable};
use crate::se3::Se3Covector;
use crate::stability::{
    allowed_wavenumbers, critical_ionic_strength, default_k_grid, dispersion, instability_scan,
    twist_oracle_check, LinearizationContext, StraightRodSetup, TwistChain,
};
use crate::Error;
use std::f64::consts::{PI, TAU};

/// Largest accepted relative gap in `twist-check`.
pub const TWIST_ORACLE_TOLERANCE: f64 = 1e-9;
/// Bisection tolerance on the band edge.
pub const K_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Landscape,
    Minima,
    Dispersion,
    StabilityScan,
    TwistCheck,
    TwoHelix,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Landscape => "landscape",
            Command::Minima => "minima",
            Command::Dispersion => "dispersion",
            Command::StabilityScan => "stability-scan",
            Command::TwistCheck => "twist-check",
            Command::TwoHelix => "two-helix",
        }
    }
}

/// A finished table, plus the error that should set the exit status even
/// though the table is still written.
#[derive(Debug)]
pub struct Outcome {
    pub table: ResultTable,
    pub failure: Option<Error>,
}

impl Outcome {
    fn ok(table: ResultTable) -> Self {
        Outcome { table, failure: None }
    }
}

fn preamble(cmd: Command, cfg: &RunConfig, t: &mut ResultTable) {
    t.note(&format!("helix-se3 {} {}", env!("CARGO_PKG_VERSION"), cmd.name()));
    t.note("config:");
    for l in cfg.echo().lines() {
        t.note(&format!("  {l}"));
    }
}

fn energy_options(cfg: &RunConfig) -> EnergyOptions {
    EnergyOptions { twist_penalty: cfg.twist_penalty, sum: cfg.sum }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, Error> {
    match cmd {
        Command::Landscape => cmd_landscape(cfg),
        Command::Minima => cmd_minima(cfg),
        Command::Dispersion => cmd_dispersion(cfg),
        Command::StabilityScan => cmd_stability_scan(cfg),
        Command::TwistCheck => cmd_twist_check(cfg),
        Command::TwoHelix => cmd_two_helix(cfg),
    }
}

fn landscape_spec(cfg: &RunConfig) -> LandscapeSpec {
    let (r0, r1, nr) = cfg.r_range;
    let (c0, c1, nc) = cfg.c_range;
    LandscapeSpec {
        r_axis: linspace(r0, r1, nr),
        c_axis: linspace(c0, c1, nc),
        alpha_samples: cfg.alpha_samples,
        bond: cfg.bond,
        options: energy_options(cfg),
    }
}

pub const LANDSCAPE_COLUMNS: [&str; 5] =
    ["R_angstrom", "C_angstrom", "argmin_alpha_rad", "energy_per_bouquet_mu", "diverged_flag"];

pub fn cmd_landscape(cfg: &RunConfig) -> Result<Outcome, Error> {
    let grid = landscape_scan(&cfg.bouquet()?, &cfg.environment()?, &landscape_spec(cfg))?;
    let mut t = ResultTable::new(&LANDSCAPE_COLUMNS);
    preamble(Command::Landscape, cfg, &mut t);
    t.note(&format!("grid: {} x {} cells, {} alpha samples", grid.r_values.len(), grid.c_values.len(), grid.alpha_samples));
    t.note(&format!("diverged cells: {}", grid.diverged.iter().filter(|&&d| d).count()));
    for (i, r) in grid.r_values.iter().enumerate() {
        for (j, c) in grid.c_values.iter().enumerate() {
            let idx = grid.index(i, j);
            t.push(vec![(*r).into(), (*c).into(), grid.argmin_alpha[idx].into(), grid.energy[idx].into(), grid.diverged[idx].into()]);
        }
    }
    Ok(Outcome::ok(t))
}

/// Rebuilds a grid from `landscape` output; rows must cover a full `R × C` product.
pub fn grid_from_table(text: &str) -> Result<LandscapeGrid, Error> {
    let (cols, rows) = ResultTable::parse_numeric(text)?;
    if cols != LANDSCAPE_COLUMNS {
        return Err(Error::Config("landscape table has unexpected columns".into()));
    }
    let mut r_values: Vec<f64> = vec![];
    let mut c_values: Vec<f64> = vec![];
    for row in &rows {
        if !r_values.contains(&row[0]) {
            r_values.push(row[0]);
        }
        if !c_values.contains(&row[1]) {
            c_values.push(row[1]);
        }
    }
    if r_values.len() * c_values.len() != rows.len() {
        return Err(Error::Config("landscape table is not a full grid".into()));
    }
    let mut grid = LandscapeGrid {
        energy: vec![f64::INFINITY; rows.len()],
        argmin_alpha: vec![0.0; rows.len()],
        diverged: vec![true; rows.len()],
        r_values,
        c_values,
        alpha_samples: 0,
    };
    for row in &rows {
        let i = grid.r_values.iter().position(|&r| r == row[0]).unwrap_or(0);
        let j = grid.c_values.iter().position(|&c| c == row[1]).unwrap_or(0);
        let idx = grid.index(i, j);
        grid.argmin_alpha[idx] = row[2];
        grid.energy[idx] = row[3];
        grid.diverged[idx] = row[4] != 0.0;
    }
    Ok(grid)
}

pub fn cmd_minima(cfg: &RunConfig) -> Result<Outcome, Error> {
    let bouquet = cfg.bouquet()?;
    let env = cfg.environment()?;
    let grid = match &cfg.landscape_csv {
        Some(p) => grid_from_table(&std::fs::read_to_string(p)?)?,
        None => landscape_scan(&bouquet, &env, &landscape_spec(cfg))?,
    };
    let found = find_minima(&grid, &bouquet, &env, &energy_options(cfg), cfg.bond, cfg.gradient_tolerance);
    let mut t = ResultTable::new(&["R_angstrom", "C_angstrom", "alpha_rad", "energy_per_bouquet_mu", "gradient_norm"]);
    preamble(Command::Minima, cfg, &mut t);
    t.note(&format!("grid cells: {} x {}", grid.r_values.len(), grid.c_values.len()));
    t.note(&format!("stationary minima kept (gradient norm < {}): {}", format_number(cfg.gradient_tolerance), found.len()));
    for m in found {
        t.push(vec![m.radius.into(), m.pitch.into(), m.alpha.into(), m.energy.into(), m.gradient_norm.into()]);
    }
    Ok(Outcome::ok(t))
}

pub fn linearization(cfg: &RunConfig) -> Result<LinearizationContext, Error> {
    let (b, env, el) = (cfg.bouquet()?, cfg.environment()?, cfg.elastic()?);
    match cfg.base {
        BaseState::Straight => LinearizationContext::straight_rod(b, env, el, cfg.bond, &cfg.sum),
        BaseState::Helix => {
            let [r, c, a] = cfg.helix;
            let conf = Conformation::new(r, c, a, cfg.bond, b)?;
            LinearizationContext::from_conformation(&conf, env, el, Se3Covector::zero(), &cfg.sum)
        }
    }
}

fn same_k(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

pub fn cmd_dispersion(cfg: &RunConfig) -> Result<Outcome, Error> {
    let ctx = linearization(cfg)?;
    let mut ks = if cfg.full_period {
        (1..2 * cfg.k_points).map(|i| PI * i as f64 / cfg.k_points as f64).collect()
    } else {
        default_k_grid(cfg.k_points)
    };
    let top = if cfg.full_period { TAU } else { PI + 1e-12 };
    for &n in &cfg.chain_lengths {
        for k in allowed_wavenumbers(n)? {
            if k <= top && !ks.iter().any(|&q| same_k(q, k)) {
                ks.push(k);
            }
        }
    }
    ks.sort_by(f64::total_cmp);
    let d = dispersion(&ctx, &ks)?;
    let mut cols: Vec<String> = ["k", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "lambda_5", "lambda_6"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.push("hermiticity_residual".into());
    cols.push("eigen_residual".into());
    for n in &cfg.chain_lengths {
        cols.push(format!("allowed_N{n}"));
    }
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = ResultTable::new(&col_refs);
    preamble(Command::Dispersion, cfg, &mut t);
    t.note(&format!("linearization: {:?}, window {} shells, converged {}", ctx.mode, ctx.window, ctx.converged));
    t.note(&format!("debye length: {} angstrom", format_number(ctx.environment.debye_length)));
    for (a, b) in &d.unstable_band {
        t.note(&format!("unstable band on grid: [{}, {}]", format_number(*a), format_number(*b)));
    }
    let allowed: Vec<Vec<f64>> = cfg.chain_lengths.iter().map(|&n| allowed_wavenumbers(n)).collect::<Result<_, _>>()?;
    for (n, ak) in cfg.chain_lengths.iter().zip(&allowed) {
        let worst = ks
            .iter()
            .zip(&d.lambdas)
            .filter(|(k, _)| ak.iter().any(|&a| same_k(a, **k)))
            .map(|(_, l)| l[0])
            .fold(f64::INFINITY, f64::min);
        let verdict = if worst < 0.0 { "unstable" } else { "stable" };
        t.note(&format!("N = {n}: min lambda over allowed k = {} ({verdict})", format_number(worst)));
    }
    for (i, k) in ks.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(*k).into()];
        row.extend(d.lambdas[i].iter().map(|&l| Cell::Num(l)));
        row.push(d.hermiticity[i].into());
        row.push(d.eigen_residual[i].into());
        for ak in &allowed {
            row.push(ak.iter().any(|&a| same_k(a, *k)).into());
        }
        t.push(row);
    }
    Ok(Outcome::ok(t))
}

pub fn straight_setup(cfg: &RunConfig) -> Result<StraightRodSetup, Error> {
    Ok(StraightRodSetup {
        bouquet: cfg.bouquet()?,
        elastic: cfg.elastic()?,
        relative_permittivity: cfg.relative_permittivity,
        temperature: cfg.temperature,
        spacing: cfg.bond,
        rule: cfg.sum,
        k_grid: default_k_grid(cfg.k_points),
        k_tolerance: K_TOLERANCE,
    })
}

pub fn cmd_stability_scan(cfg: &RunConfig) -> Result<Outcome, Error> {
    if cfg.ionic_strengths.is_empty() {
        return Err(Error::Config("`scan.ionic_strengths` is empty".into()));
    }
    let setup = straight_setup(cfg)?;
    let rows = instability_scan(&setup, &cfg.ionic_strengths)?;
    let mut t = ResultTable::new(&["I_mol_per_l", "k_star", "max_stable_N", "debye_length_angstrom", "window"]);
    preamble(Command::StabilityScan, cfg, &mut t);
    t.note(&format!("k grid: {} points on (0, pi], edge bisection to {}", cfg.k_points, format_number(K_TOLERANCE)));
    if let Some((lo, hi)) = cfg.bracket {
        match critical_ionic_strength(&setup, lo, hi, 1e-4)? {
            Some(i) => t.note(&format!("critical ionic strength: {} mol/l", format_number(i))),
            None => t.note(&format!(
                "critical ionic strength: not bracketed by [{}, {}]",
                format_number(lo),
                format_number(hi)
            )),
        }
    }
    for r in rows {
        let n = match r.max_stable_n {
            Some(n) => Cell::from(n),
            None => Cell::from("inf"),
        };
        t.push(vec![r.ionic_strength.into(), r.k_star.into(), n, r.debye_length.into(), r.window.into()]);
    }
    Ok(Outcome::ok(t))
}

pub fn cmd_twist_check(cfg: &RunConfig) -> Result<Outcome, Error> {
    if cfg.base != BaseState::Straight {
        return Err(Error::Config("twist-check needs `dispersion.base = straight`".into()));
    }
    let ctx = linearization(cfg)?;
    let chain = TwistChain::from_bouquet(&ctx.bouquet, &ctx.environment, &ctx.elastic, cfg.bond, cfg.sum)
        .map_err(|e| Error::Config(e.to_string()))?;
    let rows = twist_oracle_check(&ctx, &chain, &default_k_grid(cfg.k_points));
    let worst = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let mut t = ResultTable::new(&["k", "analytic_lambda", "pipeline_lambda", "relative_deviation"]);
    preamble(Command::TwistCheck, cfg, &mut t);
    t.note(&format!("window: {} shells", ctx.window));
    t.note(&format!("max relative deviation: {}", format_number(worst)));
    for r in rows {
        t.push(vec![r.0.into(), r.1.into(), r.2.into(), r.3.into()]);
    }
    let failure = (worst >= TWIST_ORACLE_TOLERANCE).then(|| {
        Error::Oracle(format!("twist branch deviates by {worst:e} (limit {TWIST_ORACLE_TOLERANCE:e})"))
    });
    Ok(Outcome { table: t, failure })
}

pub fn cmd_two_helix(cfg: &RunConfig) -> Result<Outcome, Error> {
    let (b, env) = (cfg.bouquet()?, cfg.environment()?);
    let opts = energy_options(cfg);
    let one = refine_helix(&b, &env, &opts, cfg.helix, cfg.bond);
    let initial = match cfg.two_helix_initial {
        Some(v) => TwoHelixParams::from_slice(&v),
        None => TwoHelixParams::degenerate(one.radius, one.pitch, one.alpha),
    };
    let res = two_helix_optimize(&b, &env, &opts, &initial, cfg.bond, false, cfg.max_iter);
    let stationary = res.gradient_norm < cfg.gradient_tolerance;
    let mut t = ResultTable::new(&[
        "R_angstrom",
        "C_angstrom",
        "alpha_rad",
        "shift_angstrom",
        "azimuth_rad",
        "twist_rad",
        "energy_per_bouquet_mu",
        "gradient_norm",
        "one_helix_energy_mu",
        "one_helix_gradient_norm",
        "energy_minus_one_helix",
        "converged",
    ]);
    preamble(Command::TwoHelix, cfg, &mut t);
    t.note(&format!(
        "best 1-helix: R = {}, C = {}, alpha = {}",
        format_number(one.radius),
        format_number(one.pitch),
        format_number(one.alpha)
    ));
    t.note(&format!("simplex iterations: {}", res.iterations));
    if !stationary || !res.converged {
        t.note("warning: optimizer did not reach a stationary point");
    }
    let p = res.params;
    t.push(vec![
        p.radius.into(),
        p.pitch.into(),
        p.alpha.into(),
        p.shift.into(),
        p.azimuth.into(),
        p.twist.into(),
        res.energy.into(),
        res.gradient_norm.into(),
        one.energy.into(),
        one.gradient_norm.into(),
        (res.energy - one.energy).into(),
        (stationary && res.converged).into(),
    ]);
    let failure = (cfg.strict && !(stationary && res.converged))
        .then(|| Error::Numerical(format!("2-helix optimizer stopped at gradient norm {:e}", res.gradient_norm)));
    Ok(Outcome { table: t, failure })
}
