//! The canonical experiments behind the `helix` binary. Each returns an
//! [`Outcome`] listing its checks; files go to the output directory together
//! with a manifest.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::correction::helical_correction;
use crate::diagnostics::{energy_identity_residual, fit_rate, ConvergenceReport, RateFit};
use crate::error::{HelixError, Result};
use crate::euler::{run_euler, velocity_from_stream, EulerConfig, VortexNorms};
use crate::families::{VelocityFamily, VorticityFamily};
use crate::field::{l2_inner, l2_norm, ScalarField, VectorField3};
use crate::grid::{build_grid, DiskGrid};
use crate::io::{self, Cell, RunManifest};
use crate::lift::{lift, verify_scalings};
use crate::metric::{apply_lh, eval_metric, f_norm_bound, solve_lh};
use crate::ns::{run, NsConfig, NsSolver, NsState};
use crate::operators::{apply_e, grad_norm_sq, h1_seminorm, solve_pressure_poisson};
use crate::radial::OuterBc;
use crate::sigma::SigmaParam;

/// One audited quantity. `pass == None` marks a value that is reported only.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: String,
    pub pass: Option<bool>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: format!("<= {limit:e}"),
            pass: Some(value <= limit),
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: format!(">= {limit}"),
            pass: Some(value >= limit),
        }
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: format!("{target} +- {tol}"),
            pass: Some((value - target).abs() <= tol),
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, what: &str) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: what.into(),
            pass: Some(ok),
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: String::new(),
            pass: None,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        write!(f, "{tag} {}: {:.6e}", self.name, self.value)?;
        if !self.limit.is_empty() {
            write!(f, " ({})", self.limit)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub experiment: Experiment,
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
    pub report: Option<ConvergenceReport>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass != Some(false))
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Where outputs go and how many worker threads to use.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub jobs: Option<usize>,
}

impl RunContext {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            jobs: None,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| HelixError::Config(format!("thread pool: {e}")))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Runs `exp` inside a pool sized by the context.
pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    cfg.validate()?;
    std::fs::create_dir_all(&ctx.out_dir)?;
    let pool = ctx.pool()?;
    let mut out = pool.install(|| match exp {
        Experiment::NsConverge => ns_converge(cfg, ctx),
        Experiment::EulerConverge => euler_converge(cfg, ctx),
        Experiment::EnergyAudit => energy_audit(cfg, ctx),
        Experiment::OperatorCheck => operator_check(cfg, ctx),
        Experiment::LiftCheck => lift_check(cfg, ctx),
    })?;
    let mut manifest = RunManifest::new(exp, cfg);
    manifest.insert("result", if out.pass() { "pass" } else { "fail" });
    let mpath = ctx.path(&format!("{}.manifest", exp.name()));
    manifest.write(&mpath)?;
    out.files.push(mpath);
    Ok(out)
}

fn finite(s: f64) -> Result<SigmaParam> {
    SigmaParam::finite(s)
}

/// Initial velocity from the config: the dump if one is given, else the preset.
pub fn initial_velocity(cfg: &ExperimentConfig) -> Result<VectorField3> {
    if let Some(p) = &cfg.initial.dump {
        return io::read_vector_dump(p);
    }
    let g = build_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
    let fam: VelocityFamily = cfg.initial.family.parse()?;
    Ok(fam.sample(&g, cfg.initial.amplitude))
}

/// Initial vorticity from the config.
pub fn initial_vorticity(cfg: &ExperimentConfig) -> Result<ScalarField> {
    if let Some(p) = &cfg.initial.dump {
        let (_, mut f) = io::read_field_dump(p)?;
        if f.len() != 1 {
            return Err(HelixError::Format(format!(
                "vorticity dump has {} components",
                f.len()
            )));
        }
        return Ok(f.remove(0));
    }
    let g = build_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
    let fam = match cfg.initial.family.parse::<VorticityFamily>()? {
        VorticityFamily::GaussianBlob { .. } => VorticityFamily::GaussianBlob {
            cx: cfg.initial.cx,
            cy: cfg.initial.cy,
            width: cfg.initial.width,
        },
        f => f,
    };
    Ok(fam.sample(&g, cfg.initial.amplitude))
}

fn ns_config(cfg: &ExperimentConfig) -> NsConfig {
    NsConfig {
        dt: cfg.time.dt,
        t_end: cfg.time.t_end,
        nu: cfg.time.nu,
        cfl: cfg.time.cfl,
        proj_tol: cfg.tolerances.proj_tol,
        ..NsConfig::default()
    }
}

/// Difference between a helical run and the planar run from the matching
/// data, stepped together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaSample {
    pub sigma: f64,
    pub l2: f64,
    /// `int_0^t* |grad Theta|^2`, trapezoid in time
    pub h1_timeint: f64,
    /// `|v|_{H1}` of the initial correction
    pub correction_h1: f64,
}

pub fn theta_for_sigma(w_inf: &VectorField3, sigma: f64, cfg: &NsConfig) -> Result<ThetaSample> {
    let g = w_inf.grid();
    let sp = finite(sigma)?;
    let corr = helical_correction(w_inf, sp)?;
    let hel = NsSolver::new(g, sp, cfg)?;
    let pla = NsSolver::new(g, SigmaParam::Planar, cfg)?;
    let (a, _) = hel.project(&corr.field)?;
    let (b, _) = pla.project(w_inf)?;
    let mut sa = NsState::new(a, sp, cfg.nu);
    let mut sb = NsState::new(b, SigmaParam::Planar, cfg.nu);
    let grad_sq = |x: &NsState, y: &NsState| {
        let d = x.w.sub(&y.w).expect("same grid");
        h1_seminorm(&d).powi(2)
    };
    let mut prev = grad_sq(&sa, &sb);
    let mut integral = 0.0;
    for _ in 0..cfg.n_steps() {
        sa = hel.step(&sa)?;
        sb = pla.step(&sb)?;
        let now = grad_sq(&sa, &sb);
        integral += 0.5 * cfg.dt * (prev + now);
        prev = now;
    }
    let v = &corr.v;
    Ok(ThetaSample {
        sigma,
        l2: sa.w.sub(&sb.w)?.l2_norm(),
        h1_timeint: integral,
        correction_h1: (v.l2_norm_sq() + h1_seminorm(v).powi(2)).sqrt(),
    })
}

/// Theta samples for every sigma, in the order given.
pub fn theta_sweep(w_inf: &VectorField3, sigmas: &[f64], cfg: &NsConfig) -> Result<Vec<ThetaSample>> {
    sigmas
        .par_iter()
        .map(|&s| theta_for_sigma(w_inf, s, cfg))
        .collect()
}

fn ns_converge(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    let w_inf = initial_velocity(cfg)?;
    let nscfg = ns_config(cfg);
    let samples = theta_sweep(&w_inf, &cfg.sweep.sigmas, &nscfg)?;
    let report = ConvergenceReport::new(
        samples.iter().map(|s| s.sigma).collect(),
        samples.iter().map(|s| s.l2).collect(),
        samples.iter().map(|s| s.h1_timeint).collect(),
        cfg.time.t_end,
    );
    let csv = ctx.path("ns-converge.csv");
    io::write_csv(
        &csv,
        &io::NS_CONVERGE_HEADER,
        &io::numeric_rows(samples.iter().map(|s| vec![s.sigma, cfg.time.t_end, s.l2, s.h1_timeint])),
    )?;
    let mut checks: Vec<Check> = samples
        .iter()
        .map(|s| Check::info(format!("l2_theta[sigma={}]", s.sigma), s.l2))
        .collect();
    let tol = &cfg.tolerances;
    let degenerate = samples.iter().all(|s| s.l2 <= tol.floor);
    if degenerate {
        let worst = samples.iter().map(|s| s.l2).fold(0.0, f64::max);
        checks.push(Check::at_most("degenerate: max l2_theta", worst, tol.floor));
    } else {
        match &report.fit {
            Some(fit) => {
                checks.push(Check::at_most("fitted slope", fit.slope, tol.slope + tol.slope_slack));
                push_pairwise(&mut checks, fit);
            }
            None if samples.len() < 2 => {}
            None => checks.push(Check::flag("fitted slope", false, "errors must be positive")),
        }
        if let Some(fit) = report.h1_fit() {
            checks.push(Check::info("h1 time-integral slope", fit.slope));
        }
    }
    let corr: Vec<f64> = samples.iter().map(|s| s.correction_h1).collect();
    if let Ok(fit) = fit_rate(&report.sigma_values, &corr) {
        checks.push(Check::info("correction H1 slope", fit.slope));
    }
    Ok(Outcome {
        experiment: Experiment::NsConverge,
        checks,
        files: vec![csv],
        report: Some(report),
    })
}

fn push_pairwise(checks: &mut Vec<Check>, fit: &RateFit) {
    checks.push(Check::info("fit intercept", fit.intercept));
    for (i, p) in fit.pairwise.iter().enumerate() {
        checks.push(Check::info(format!("pairwise slope {i}"), *p));
    }
}

/// Stream-function differences against the planar run at `t_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiSample {
    pub sigma: f64,
    pub l2: f64,
    pub h1: f64,
    pub drift: VortexNorms,
}

pub fn psi_sweep(vort0: &ScalarField, sigmas: &[f64], cfg: &EulerConfig) -> Result<Vec<PsiSample>> {
    let planar = run_euler(vort0, SigmaParam::Planar, cfg)?;
    let psi_inf = planar.final_state().psi.clone();
    sigmas
        .par_iter()
        .map(|&s| {
            let r = run_euler(vort0, finite(s)?, cfg)?;
            let d = r.final_state().psi.sub(&psi_inf)?;
            Ok(PsiSample {
                sigma: s,
                l2: l2_norm(&d),
                h1: grad_norm_sq(&d).sqrt(),
                drift: r.max_drift(),
            })
        })
        .collect()
}

fn euler_converge(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    let vort0 = initial_vorticity(cfg)?;
    let ecfg = EulerConfig {
        dt: cfg.time.dt,
        t_end: cfg.time.t_end,
        cfl: cfg.time.cfl,
        ..EulerConfig::default()
    };
    let samples = psi_sweep(&vort0, &cfg.sweep.sigmas, &ecfg)?;
    let csv = ctx.path("euler-converge.csv");
    io::write_csv(
        &csv,
        &io::EULER_CONVERGE_HEADER,
        &io::numeric_rows(samples.iter().map(|s| {
            vec![s.sigma, cfg.time.t_end, s.l2, s.h1, s.drift.l1, s.drift.l2, s.drift.linf]
        })),
    )?;
    let report = ConvergenceReport::new(
        samples.iter().map(|s| s.sigma).collect(),
        samples.iter().map(|s| s.l2).collect(),
        samples.iter().map(|s| s.h1).collect(),
        cfg.time.t_end,
    );
    let mut checks = Vec::new();
    if samples.len() > 1 {
        checks.push(Check::flag(
            "strictly decreasing in sigma",
            report.strictly_decreasing(),
            "L2 and H1 differences",
        ));
        match &report.fit {
            Some(fit) => checks.push(Check::at_most("L2 slope", fit.slope, -1.0)),
            None => checks.push(Check::flag("L2 slope", false, "errors must be positive")),
        }
        if let Some(fit) = report.h1_fit() {
            checks.push(Check::info("H1 slope", fit.slope));
        }
    }
    let worst = |f: fn(&VortexNorms) -> f64| samples.iter().map(|s| f(&s.drift)).fold(0.0, f64::max);
    checks.push(Check::info("max L1 drift", worst(|d| d.l1)));
    checks.push(Check::at_most("max L2 drift", worst(|d| d.l2), cfg.tolerances.drift));
    checks.push(Check::at_most("max Linf drift", worst(|d| d.linf), cfg.tolerances.drift));
    Ok(Outcome {
        experiment: Experiment::EulerConverge,
        checks,
        files: vec![csv],
        report: Some(report),
    })
}

fn energy_audit(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    let w = initial_velocity(cfg)?;
    let sp = finite(cfg.sweep.sigmas[0])?;
    let w0 = helical_correction(&w, sp)?.field;
    let nscfg = ns_config(cfg);
    let result = run(&w0, sp, &nscfg)?;
    let rows = result.energy.rows();
    let csv = ctx.path("energy-audit.csv");
    io::write_csv(
        &csv,
        &io::ENERGY_HEADER,
        &io::numeric_rows(rows.iter().map(|r| {
            vec![r.t, r.kinetic, r.dissipation_viscous, r.dissipation_sigma, r.residual]
        })),
    )?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let quad = energy_identity_residual(&result.snapshots, sp)
        .iter()
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    Ok(Outcome {
        experiment: Experiment::EnergyAudit,
        checks: vec![
            Check::at_most("max energy residual", worst, cfg.tolerances.energy),
            Check::info("max residual with quadrature gradient", quad),
        ],
        files: vec![csv],
        report: None,
    })
}

/// Sigma values of the `|K - I|` sweep.
pub const F_SWEEP: [f64; 7] = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

/// Sum of a few random modes `cos(m theta + phase) r^m cos(k r)`.
pub fn random_band_limited(g: &Arc<DiskGrid>, rng: &mut ChaCha8Rng) -> ScalarField {
    let terms: Vec<(f64, f64, i32, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0..6),
                rng.gen_range(0.5..3.0),
            )
        })
        .collect();
    ScalarField::from_polar(g, move |r, t| {
        terms
            .iter()
            .map(|&(a, ph, m, k)| a * (m as f64 * t + ph).cos() * r.powi(m) * (k * r).cos())
            .sum()
    })
}

/// `max |<E f, g> + <f, E g>| / (|E f| |g| + |f| |E g|)` over random pairs.
pub fn e_antisymmetry(g: &Arc<DiskGrid>, seed: u64, pairs: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs)
        .map(|_| {
            let f = random_band_limited(g, &mut rng);
            let h = random_band_limited(g, &mut rng);
            let (ef, eh) = (apply_e(&f), apply_e(&h));
            let s = l2_inner(&ef, &h).unwrap() + l2_inner(&f, &eh).unwrap();
            let scale = l2_norm(&ef) * l2_norm(&h) + l2_norm(&f) * l2_norm(&eh);
            if scale == 0.0 {
                0.0
            } else {
                s.abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// `(1 - r^2)^2 y1`, the manufactured solution of the order tests.
pub fn mms_solution(g: &Arc<DiskGrid>) -> ScalarField {
    ScalarField::from_fn(g, |a, b| (1.0 - a * a - b * b).powi(2) * a)
}

/// `L2` errors of the `A A*` Dirichlet solve on the manufactured solution.
pub fn mms_pressure_errors(sp: SigmaParam, n_rs: &[usize], n_theta: usize) -> Result<Vec<f64>> {
    let s2 = sp.coupling_sq();
    n_rs.iter()
        .map(|&n| {
            let g = build_grid(n, n_theta)?;
            let exact = mms_solution(&g);
            let rhs = ScalarField::from_fn(&g, |a, b| {
                let r2 = a * a + b * b;
                (16.0 - 24.0 * r2) * a + s2 * (1.0 - r2).powi(2) * a
            });
            let got = solve_pressure_poisson(&rhs, sp, OuterBc::Dirichlet)?;
            Ok(l2_norm(&got.sub(&exact)?))
        })
        .collect()
}

/// `L_H` applied to the manufactured solution, in closed form.
pub fn mms_lh_rhs(g: &Arc<DiskGrid>, sp: SigmaParam) -> ScalarField {
    ScalarField::from_polar(g, |r, t| {
        let r3 = r * r * r;
        let c = match sp.alpha() {
            None => -16.0 * r + 24.0 * r3,
            Some(a) => {
                let a2 = a * a;
                let d = a2 + r * r;
                r / d - 18.0 * r + 25.0 * r3 + a2 * (2.0 * r - r3) / d
            }
        };
        c * t.cos()
    })
}

pub fn mms_lh_errors(sp: SigmaParam, n_rs: &[usize], n_theta: usize) -> Result<Vec<f64>> {
    n_rs.iter()
        .map(|&n| {
            let g = build_grid(n, n_theta)?;
            let exact = mms_solution(&g);
            let got = solve_lh(&mms_lh_rhs(&g, sp), sp);
            Ok(l2_norm(&got.sub(&exact)?))
        })
        .collect()
}

/// `log2(e[i] / e[i + 1])` for successive grid doublings.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|p| (p[0] / p[1]).log2()).collect()
}

pub const MMS_GRIDS: [usize; 3] = [32, 64, 128];

/// The identity and order checks of `operator-check`.
pub fn operator_identities(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let g = build_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
    let tol = cfg.tolerances.identity;
    let mut checks = vec![Check::at_most("E antisymmetry", e_antisymmetry(&g, cfg.seed, 10), tol)];

    let mut hk = 0.0f64;
    let mut fmis = 0.0f64;
    for &s in F_SWEEP.iter().chain(&cfg.sweep.sigmas) {
        let sp = finite(s)?;
        let m = eval_metric(&g, sp);
        hk = hk.max(m.hk_identity_error());
        let f = m.boundary_f_norm();
        fmis = fmis.max((f - f_norm_bound(sp)).abs());
        let (lo, hi) = m.k_spectrum();
        let a2 = sp.alpha().unwrap().powi(2);
        if lo < a2 / (a2 + 1.0) - tol || hi > 1.0 + tol || m.max_f_norm() > f_norm_bound(sp) + tol {
            checks.push(Check::flag(format!("K spectrum [sigma={s}]"), false, "[a^2/(a^2+1), 1]"));
        }
    }
    checks.push(Check::at_most("H K = I", hk, tol));
    checks.push(Check::at_most("|K - I| at |y| = 1 vs 1/(alpha^2+1)", fmis, 1e-10));
    let fvals: Vec<f64> = F_SWEEP
        .iter()
        .map(|&s| eval_metric(&g, SigmaParam::Finite(s)).boundary_f_norm())
        .collect();
    let fit = fit_rate(&F_SWEEP, &fvals)?;
    checks.push(Check::within("|K - I| sigma slope", fit.slope, -2.0, 0.05));
    checks.push(Check::info("|K - I| slope, last pair", *fit.pairwise.last().unwrap()));

    let sp = finite(cfg.sweep.sigmas[0])?;
    for (name, errs) in [
        ("A A* order", mms_pressure_errors(sp, &MMS_GRIDS, 32)?),
        ("L_H order", mms_lh_errors(sp, &MMS_GRIDS, 32)?),
    ] {
        let worst = observed_orders(&errs).into_iter().fold(f64::INFINITY, f64::min);
        checks.push(Check::at_least(name, worst, 1.9));
    }
    Ok(checks)
}

fn operator_check(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    let g = build_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
    let csv = ctx.path("operator-check.csv");
    io::write_csv(
        &csv,
        &io::F_BOUND_HEADER,
        &io::numeric_rows(F_SWEEP.iter().map(|&s| {
            let sp = SigmaParam::Finite(s);
            vec![s, eval_metric(&g, sp).boundary_f_norm(), f_norm_bound(sp)]
        })),
    )?;
    Ok(Outcome {
        experiment: Experiment::OperatorCheck,
        checks: operator_identities(cfg)?,
        files: vec![csv],
        report: None,
    })
}

pub const LIFT_FAMILIES: [VelocityFamily; 3] = [
    VelocityFamily::DefaultGeneric,
    VelocityFamily::BesselSwirlVertical,
    VelocityFamily::RadialSwirl,
];

fn lift_check(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    let g = build_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
    let n_z = cfg.grid.n_z;
    let mut rows = Vec::new();
    let (mut eq, mut trip, mut inv, mut grad, mut d3) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let shift = (n_z / 4).max(1);
    for &s in &cfg.sweep.sigmas {
        let sp = finite(s)?;
        for fam in LIFT_FAMILIES {
            let w = fam.sample(&g, cfg.initial.amplitude);
            let r = verify_scalings(&w, sp, n_z)?;
            eq = eq.max(r.l2_rel_error);
            grad = grad.max(r.grad_ratio);
            d3 = d3.max(r.d3_constant);
            let u = lift(&w, sp, n_z)?;
            for l in 0..n_z {
                trip = trip.max(u.restrict_level(l).sub(&w)?.max_norm());
            }
            if let Ok(e) = u.invariance_error(shift) {
                inv = inv.max(e);
            }
            rows.push(vec![
                Cell::Num(s),
                Cell::Text(fam.name().into()),
                Cell::Num(r.u_l2),
                Cell::Num(r.w_l2),
                Cell::Num(r.l2_rel_error),
                Cell::Num(r.grad_ratio),
                Cell::Num(r.d3_constant),
            ]);
        }
    }
    let csv = ctx.path("lift-check.csv");
    io::write_csv(&csv, &io::SCALING_HEADER, &rows)?;

    let sp = finite(cfg.sweep.sigmas[0])?;
    let psi = ScalarField::from_fn(&g, |a, b| (1.0 - a * a - b * b) * (1.0 + a * b + 0.3 * b));
    let swirl_free = lift(&velocity_from_stream(&psi, sp), sp, n_z)?.no_swirl_residual();
    let alpha = sp.alpha().unwrap();
    let xi = VectorField3::from_fn(&g, |a, b| [b, -a, alpha]);
    let xi_res = lift(&xi, sp, n_z)?.no_swirl_residual();

    Ok(Outcome {
        experiment: Experiment::LiftCheck,
        checks: vec![
            Check::at_most("|u| = sqrt(sigma) |w|", eq, 1e-8),
            Check::at_most("lift/restrict round trip", trip, 1e-12),
            Check::at_most("helical invariance", inv, 1e-10),
            Check::at_most("|grad_H u| / (sqrt(sigma) |grad w|)", grad, 1.0 + 1e-8),
            Check::at_most("sqrt(sigma) |d3 u| / |w|_H1", d3, crate::lift::D3_CONSTANT_BOUND),
            Check::at_most("no-swirl residual of stream velocity", swirl_free, 1e-12),
            Check::at_least("no-swirl residual of xi", xi_res, 1.0 - 1e-12),
        ],
        files: vec![csv],
        report: None,
    })
}

/// Applies `L_H` and reports `max |L_H psi - vort| / max |vort|` after a solve.
pub fn lh_round_trip(vort: &ScalarField, sp: SigmaParam) -> f64 {
    let psi = solve_lh(vort, sp);
    let back = apply_lh(&psi, sp);
    back.sub(vort).expect("same grid").max_abs() / vort.max_abs().max(f64::MIN_POSITIVE)
}

pub fn default_out_dir() -> &'static Path {
    Path::new("helix-out")
}
