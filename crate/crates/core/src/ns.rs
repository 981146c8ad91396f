//! Reduced helical Navier-Stokes system and its planar limit.
//!
//! One step: explicit advection (skew form, dealiased), Crank-Nicolson on
//! `nu (Lap + (2 pi/sigma)^2 [E^2 w - 2 E w_H^perp - w_H])` with zero boundary
//! values, then the exact projection onto `ker A`. The sigma-bracket is
//! diagonal per mode: on `W = w1 + i w2` it is `-(m - 1)^2`, on `w3` it is
//! `-m^2`, so the implicit solves stay tridiagonal.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HelixError, Result};
use crate::field::{forward_real, inverse_real, l2_inner, l2_norm, ScalarField, VectorField3};
use crate::grid::DiskGrid;
use crate::operators::{apply_e, constraint_residual, gradient, h1_seminorm};
use crate::radial::{column, radial_operator, set_column, OuterBc, RadialOp, TridiagLu};
use crate::sigma::SigmaParam;
use crate::staggered::ConstraintOp;

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct NsConfig {
    pub dt: f64,
    pub t_end: f64,
    pub nu: f64,
    /// Largest accepted `max|w| dt / dr`.
    pub cfl: f64,
    /// Largest accepted max-norm constraint residual after a projection.
    pub proj_tol: f64,
    pub dealias: bool,
    /// Keep every `snapshot_every`-th step (the final step is always kept).
    pub snapshot_every: usize,
}

impl Default for NsConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 0.5,
            nu: 1.0,
            cfl: 0.5,
            proj_tol: 1e-8,
            dealias: true,
            snapshot_every: 1,
        }
    }
}

impl NsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(HelixError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(HelixError::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if !(self.nu > 0.0) {
            return Err(HelixError::Config(format!("nu must be positive, got {}", self.nu)));
        }
        if self.snapshot_every == 0 {
            return Err(HelixError::Config("snapshot_every must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Debug)]
pub struct NsState {
    pub w: VectorField3,
    /// Pressure, zero mean.
    pub q: ScalarField,
    pub t: f64,
    pub sp: SigmaParam,
    pub nu: f64,
}

impl NsState {
    pub fn new(w: VectorField3, sp: SigmaParam, nu: f64) -> Self {
        let q = ScalarField::zeros(w.grid());
        Self { w, q, t: 0.0, sp, nu }
    }
}

/// Energy terms at one time: kinetic `|w|^2` and the two dissipation rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    pub kinetic: f64,
    /// `nu |grad w|^2` in the form the stepper uses, `-nu Re<w, Lap_h w>`.
    pub viscous_rate: f64,
    /// `nu (2 pi/sigma)^2 (|E w3|^2 + |E w_H - w_H^perp|^2)`.
    pub sigma_rate: f64,
}

/// `E w_H - w_H^perp = (E w1 + w2, E w2 - w1)`.
fn twisted_h(w: &VectorField3) -> (ScalarField, ScalarField) {
    let e1 = apply_e(&w.w1);
    let e2 = apply_e(&w.w2);
    (
        e1.add(&w.w2).expect("same grid"),
        e2.sub(&w.w1).expect("same grid"),
    )
}

fn sq(f: &ScalarField) -> f64 {
    l2_inner(f, f).expect("same grid")
}

/// `(w_H . grad) f`, pointwise.
fn advect(w1: &[f64], w2: &[f64], f: &ScalarField) -> Vec<f64> {
    let d = gradient(f);
    let (a, b) = (d.w1.phys(), d.w2.phys());
    (0..w1.len()).map(|i| w1[i] * a[i] + w2[i] * b[i]).collect()
}

/// The explicit right-hand side in its textbook form, at unit viscosity:
/// `-(w_H.grad)w - s w3 [E w - w_H^perp] + s^2 [E^2 w - 2 E w_H^perp - w_H]`
/// with `s = 2 pi / sigma` (only `E^2 w3` in the third component).
pub fn ns_rhs(w: &VectorField3, sp: SigmaParam) -> VectorField3 {
    let g = w.grid();
    let s = sp.coupling();
    let (w1, w2, w3) = (w.w1.phys(), w.w2.phys(), w.w3.phys());
    let adv: Vec<Vec<f64>> = w.components().iter().map(|c| advect(&w1, &w2, c)).collect();
    let ew: Vec<Vec<f64>> = w.components().iter().map(|c| apply_e(c).into_values()).collect();
    let e2w: Vec<Vec<f64>> = w
        .components()
        .iter()
        .map(|c| apply_e(&apply_e(c)).into_values())
        .collect();
    let n = g.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let s2 = s * s;
    for i in 0..n {
        let perp = [-w2[i], w1[i]];
        // E w_H^perp = (-E w2, E w1)
        let eperp = [-ew[1][i], ew[0][i]];
        for c in 0..2 {
            out[c][i] = -adv[c][i] - s * w3[i] * (ew[c][i] - perp[c])
                + s2 * (e2w[c][i] - 2.0 * eperp[c] - [w1[i], w2[i]][c]);
        }
        out[2][i] = -adv[2][i] - s * w3[i] * ew[2][i] + s2 * e2w[2][i];
    }
    let [a, b, c] = out;
    VectorField3 {
        w1: ScalarField::from_values(g, a),
        w2: ScalarField::from_values(g, b),
        w3: ScalarField::from_values(g, c),
    }
}

/// Reduced Navier-Stokes stepper for one grid, sigma, viscosity and step.
#[derive(Debug)]
pub struct NsSolver {
    grid: Arc<DiskGrid>,
    sp: SigmaParam,
    nu: f64,
    dt: f64,
    dealias: bool,
    cfl: f64,
    proj_tol: f64,
    projector: ConstraintOp,
    ops_h: Vec<RadialOp>,
    ops_3: Vec<RadialOp>,
    lu_h: Vec<TridiagLu>,
    lu_3: Vec<TridiagLu>,
}

fn linear_ops(grid: &DiskGrid, s2: f64, shift: f64) -> Vec<RadialOp> {
    (0..grid.n_theta)
        .into_par_iter()
        .map(|k| {
            let m = grid.wavenumber(k) as f64;
            let me = grid.deriv_wavenumber(k) - shift;
            let extra = s2 * me * me;
            radial_operator(grid, OuterBc::Dirichlet, |j| -(m * m) / (grid.r[j] * grid.r[j]) - extra)
        })
        .collect()
}

impl NsSolver {
    pub fn new(grid: &Arc<DiskGrid>, sp: SigmaParam, cfg: &NsConfig) -> Result<Self> {
        cfg.validate()?;
        let s2 = sp.coupling_sq();
        let ops_h = linear_ops(grid, s2, 1.0);
        let ops_3 = linear_ops(grid, s2, 0.0);
        let a = 0.5 * cfg.dt * cfg.nu;
        let lu = |ops: &[RadialOp]| -> Vec<TridiagLu> {
            ops.iter().map(|op| op.tri.shifted(1.0, -a).factor()).collect()
        };
        Ok(Self {
            grid: Arc::clone(grid),
            sp,
            nu: cfg.nu,
            dt: cfg.dt,
            dealias: cfg.dealias,
            cfl: cfg.cfl,
            proj_tol: cfg.proj_tol,
            projector: ConstraintOp::new(grid, sp.coupling()),
            lu_h: lu(&ops_h),
            lu_3: lu(&ops_3),
            ops_h,
            ops_3,
        })
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        &self.grid
    }

    pub fn sigma(&self) -> SigmaParam {
        self.sp
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn projector(&self) -> &ConstraintOp {
        &self.projector
    }

    /// Advection in skew form plus the sigma coupling:
    /// `-(C(w) + w A(w) / 2) + s w3 w_H^perp` with
    /// `C(w) = (w_H.grad) w + s w3 E w`.
    pub fn nonlinear(&self, w: &VectorField3) -> VectorField3 {
        let g = &self.grid;
        let s = self.sp.coupling();
        let w = if self.dealias { w.dealiased() } else { w.clone() };
        let (w1, w2, w3) = (w.w1.phys(), w.w2.phys(), w.w3.phys());
        let div = self.projector.residual(&w, true).into_values();
        let n = g.len();
        let comps = w.components();
        let parts: Vec<Vec<f64>> = comps
            .par_iter()
            .map(|c| {
                let adv = advect(&w1, &w2, c);
                let e = apply_e(c).into_values();
                let v = c.phys();
                (0..n)
                    .map(|i| -(adv[i] + s * w3[i] * e[i]) - 0.5 * v[i] * div[i])
                    .collect()
            })
            .collect();
        let mut it = parts.into_iter();
        let (mut a, mut b, c) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        if s != 0.0 {
            for i in 0..n {
                a[i] -= s * w3[i] * w2[i];
                b[i] += s * w3[i] * w1[i];
            }
        }
        let out = VectorField3 {
            w1: ScalarField::from_values(g, a),
            w2: ScalarField::from_values(g, b),
            w3: ScalarField::from_values(g, c),
        };
        if self.dealias {
            out.dealiased()
        } else {
            out
        }
    }

    pub fn cfl_number(&self, w: &VectorField3) -> f64 {
        w.max_norm() * self.dt / self.grid.dr
    }

    /// Crank-Nicolson solve of `(I - dt/2 nu L) x = (I + dt/2 nu L) w + dt f`
    /// per mode, zero boundary values.
    fn implicit(&self, w: &VectorField3, f: &VectorField3) -> VectorField3 {
        let g = &self.grid;
        let n = g.n_r;
        let a = 0.5 * self.dt * self.nu;
        let dt = self.dt;
        let complex = |x: &ScalarField, y: &ScalarField| -> Vec<C> {
            let (p, q) = (x.phys(), y.phys());
            let mut v: Vec<C> = p.iter().zip(q.iter()).map(|(&a, &b)| C::new(a, b)).collect();
            g.forward_rings(&mut v);
            v
        };
        let wh = complex(&w.w1, &w.w2);
        let fh = complex(&f.w1, &f.w2);
        let w3 = forward_real(g, &w.w3.phys());
        let f3 = forward_real(g, &f.w3.phys());
        let solve = |ops: &[RadialOp], lus: &[TridiagLu], x: &[C], rhs: &[C]| -> Vec<C> {
            let cols: Vec<Vec<C>> = (0..g.n_theta)
                .into_par_iter()
                .map(|k| {
                    let mut c = column(g, x, k);
                    c[n] = ZERO;
                    let lx = ops[k].apply(&c, ZERO);
                    let fr = column(g, rhs, k);
                    let mut b: Vec<C> = (0..n).map(|j| c[j] + lx[j] * a + fr[j] * dt).collect();
                    lus[k].solve(&mut b);
                    b.push(ZERO);
                    b
                })
                .collect();
            let mut out = vec![ZERO; g.len()];
            for (k, c) in cols.iter().enumerate() {
                set_column(g, &mut out, k, c);
            }
            out
        };
        let mut h = solve(&self.ops_h, &self.lu_h, &wh, &fh);
        g.inverse_rings(&mut h);
        let w1: Vec<f64> = h.iter().map(|c| c.re).collect();
        let w2: Vec<f64> = h.iter().map(|c| c.im).collect();
        let m3 = solve(&self.ops_3, &self.lu_3, &w3, &f3);
        VectorField3 {
            w1: ScalarField::from_values(g, w1),
            w2: ScalarField::from_values(g, w2),
            w3: ScalarField::from_values(g, inverse_real(g, &m3)),
        }
    }

    /// Exact projection onto the constraint kernel; returns the raw
    /// potential `q` with `w = w_star + A* q`.
    pub fn project(&self, w_star: &VectorField3) -> Result<(VectorField3, ScalarField)> {
        let (w, q) = self.projector.project(w_star);
        let res = self.projector.residual(&w, true).max_abs();
        let scale = w.max_norm().max(1.0) * self.proj_tol;
        if res > scale {
            return Err(HelixError::Solver {
                residual: res,
                tol: scale,
            });
        }
        Ok((w, q))
    }

    pub fn step(&self, state: &NsState) -> Result<NsState> {
        let cfl = self.cfl_number(&state.w);
        if cfl > self.cfl {
            return Err(HelixError::Cfl {
                dt: self.dt,
                limit: self.dt * self.cfl / cfl,
            });
        }
        let nl = self.nonlinear(&state.w);
        let w_star = self.implicit(&state.w, &nl);
        let (w, q) = self.project(&w_star)?;
        Ok(NsState {
            w,
            q: q.scale(1.0 / self.dt),
            t: state.t + self.dt,
            sp: self.sp,
            nu: self.nu,
        })
    }

    /// Kinetic energy and dissipation rates of `w` for this solver's
    /// operators.
    pub fn energy(&self, w: &VectorField3, t: f64) -> EnergySample {
        let g = &self.grid;
        let lap_ops = crate::operators::mode_operators(g, OuterBc::Dirichlet, |_| 0.0);
        let mut visc = 0.0;
        for c in w.components() {
            let z = c.clone().with_zero_trace();
            let l = crate::operators::apply_modes(g, &lap_ops, &z.spec());
            let lf = ScalarField::from_values(g, inverse_real(g, &l));
            visc -= l2_inner(&z, &lf).expect("same grid");
        }
        let s2 = self.sp.coupling_sq();
        let sigma_rate = if s2 == 0.0 {
            0.0
        } else {
            let (a, b) = twisted_h(w);
            s2 * (sq(&apply_e(&w.w3)) + sq(&a) + sq(&b))
        };
        EnergySample {
            t,
            kinetic: w.l2_norm_sq(),
            viscous_rate: self.nu * visc,
            sigma_rate: self.nu * sigma_rate,
        }
    }
}

/// Accumulated energy budget; one record per step including `t = 0`.
#[derive(Clone, Debug, Default)]
pub struct EnergyLog {
    pub samples: Vec<EnergySample>,
}

/// One row of the energy audit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    pub kinetic: f64,
    /// `2 int_0^t nu |grad w|^2`
    pub dissipation_viscous: f64,
    /// `2 int_0^t nu s^2 (...)`
    pub dissipation_sigma: f64,
    /// `|E(0) - E(t) - dissipation| / E(0)` (absolute when `E(0) = 0`).
    pub residual: f64,
}

impl EnergyLog {
    pub fn push(&mut self, s: EnergySample) {
        self.samples.push(s);
    }

    /// Trapezoid-in-time budget for every record.
    pub fn rows(&self) -> Vec<EnergyRow> {
        let mut out = Vec::with_capacity(self.samples.len());
        let Some(first) = self.samples.first() else {
            return out;
        };
        let e0 = first.kinetic;
        let (mut dv, mut ds) = (0.0, 0.0);
        for (i, s) in self.samples.iter().enumerate() {
            if i > 0 {
                let p = &self.samples[i - 1];
                let h = s.t - p.t;
                dv += h * (p.viscous_rate + s.viscous_rate);
                ds += h * (p.sigma_rate + s.sigma_rate);
            }
            let defect = e0 - s.kinetic - dv - ds;
            let residual = if e0 > 0.0 { defect.abs() / e0 } else { defect.abs() };
            out.push(EnergyRow {
                t: s.t,
                kinetic: s.kinetic,
                dissipation_viscous: dv,
                dissipation_sigma: ds,
                residual,
            });
        }
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.rows().iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct NsRun {
    pub snapshots: Vec<NsState>,
    pub energy: EnergyLog,
}

impl NsRun {
    pub fn final_state(&self) -> &NsState {
        self.snapshots.last().expect("at least the initial snapshot")
    }
}

/// Checks the initial data against the constraint (to grid order), projects
/// it exactly, and integrates to `cfg.t_end`.
pub fn run(initial: &VectorField3, sp: SigmaParam, cfg: &NsConfig) -> Result<NsRun> {
    let solver = NsSolver::new(initial.grid(), sp, cfg)?;
    let res = l2_norm(&constraint_residual(initial, sp));
    let scale = h1_seminorm(initial);
    if res > crate::correction::PRECONDITION_TOL * scale {
        return Err(HelixError::Precondition(format!(
            "initial constraint residual {res:.3e} is not at grid level (|grad w| = {scale:.3e})"
        )));
    }
    let (w0, _) = solver.projector.project(initial);
    run_from(&solver, NsState::new(w0, sp, cfg.nu), cfg)
}

/// Integrates from an already admissible state.
pub fn run_from(solver: &NsSolver, init: NsState, cfg: &NsConfig) -> Result<NsRun> {
    let steps = cfg.n_steps();
    let mut energy = EnergyLog::default();
    energy.push(solver.energy(&init.w, init.t));
    let mut snapshots = vec![init.clone()];
    let mut state = init;
    for i in 1..=steps {
        state = solver.step(&state)?;
        energy.push(solver.energy(&state.w, state.t));
        if i % cfg.snapshot_every == 0 || i == steps {
            snapshots.push(state.clone());
        }
    }
    Ok(NsRun { snapshots, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn swirl(g: &Arc<DiskGrid>, w3: impl Fn(f64) -> f64) -> VectorField3 {
        VectorField3::from_fn(g, |a, b| {
            let r2 = a * a + b * b;
            let v = 1.0 - r2;
            [-b * v, a * v, w3(r2.sqrt())]
        })
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = build_grid(16, 16).unwrap();
        let cfg = NsConfig {
            t_end: 0.01,
            ..Default::default()
        };
        let run = run(&VectorField3::zeros(&g), SigmaParam::finite(2.0).unwrap(), &cfg).unwrap();
        assert_eq!(run.final_state().w.max_norm(), 0.0);
        assert!((run.final_state().t - 0.01).abs() < 1e-12);
        assert_eq!(ns_rhs(&VectorField3::zeros(&g), SigmaParam::Planar).max_norm(), 0.0);
    }

    #[test]
    fn zero_end_time_returns_initial() {
        let g = build_grid(16, 16).unwrap();
        let w = swirl(&g, |_| 0.0);
        let cfg = NsConfig {
            t_end: 0.0,
            ..Default::default()
        };
        let run = run(&w, SigmaParam::Planar, &cfg).unwrap();
        assert_eq!(run.snapshots.len(), 1);
        assert!(run.final_state().w.sub(&w).unwrap().max_norm() < 1e-12);
    }

    #[test]
    fn swirl_bracket_cancels() {
        let g = build_grid(16, 32).unwrap();
        let w = swirl(&g, |_| 0.0);
        let a = ns_rhs(&w, SigmaParam::finite(2.0).unwrap());
        let b = ns_rhs(&w, SigmaParam::Planar);
        assert!(a.sub(&b).unwrap().max_norm() < 1e-12);
    }

    #[test]
    fn radial_w3_under_swirl_has_no_rhs() {
        let g = build_grid(16, 32).unwrap();
        let w = swirl(&g, |r| 1.0 - r * r);
        let f = ns_rhs(&w, SigmaParam::finite(3.0).unwrap());
        assert!(f.w3.max_abs() < 1e-12);
    }

    #[test]
    fn cfl_violation_is_refused() {
        let g = build_grid(16, 16).unwrap();
        let w = swirl(&g, |_| 0.0).scale(100.0);
        let cfg = NsConfig {
            dt: 0.1,
            t_end: 0.1,
            ..Default::default()
        };
        let solver = NsSolver::new(&g, SigmaParam::Planar, &cfg).unwrap();
        assert!(matches!(
            solver.step(&NsState::new(w, SigmaParam::Planar, 1.0)),
            Err(HelixError::Cfl { .. })
        ));
    }

    #[test]
    fn energy_log_budget() {
        let mut log = EnergyLog::default();
        // trapezoid error is about h^2 / 12 * 4 at spacing h
        for i in 0..=100 {
            let t = i as f64 * 0.01;
            log.push(EnergySample {
                t,
                kinetic: (-2.0 * t).exp(),
                viscous_rate: (-2.0 * t).exp(),
                sigma_rate: 0.0,
            });
        }
        assert!(log.max_residual() < 1e-4, "{}", log.max_residual());
        assert!(EnergyLog::default().rows().is_empty());
    }
}
