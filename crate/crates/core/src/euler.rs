//! Inviscid reduced system in vorticity / stream-function form:
//! `vort_t + grad_perp(psi) . grad(vort) = 0`, `L_H psi = vort`, `psi = 0` on
//! the circle. SSP-RK3 in time, no added dissipation.

use std::sync::Arc;

use crate::error::{HelixError, Result};
use crate::field::{l2_inner, lp_norm, ScalarField, VectorField3};
use crate::grid::DiskGrid;
use crate::metric::{metric_h, metric_k, LhSolver};
use crate::operators::{apply_e, gradient, perp_dot};
use crate::sigma::SigmaParam;

#[derive(Clone, Debug)]
pub struct EulerConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Largest accepted `dt * max(|u_r|/dr + |u_theta| m_max / r)`.
    pub cfl: f64,
    pub dealias: bool,
    pub snapshot_every: usize,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            cfl: 1.5,
            dealias: true,
            snapshot_every: 100,
        }
    }
}

impl EulerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(HelixError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(HelixError::Config(format!("t_end must be >= 0, got {}", self.t_end)));
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
pub struct EulerState {
    pub vort: ScalarField,
    pub psi: ScalarField,
    pub t: f64,
    pub sp: SigmaParam,
}

/// `grad_perp f = (-d2 f, d1 f)`.
pub fn perp_gradient(f: &ScalarField) -> (Vec<f64>, Vec<f64>) {
    let d = gradient(f);
    let a = d.w2.phys().iter().map(|x| -x).collect();
    (a, d.w1.into_values())
}

/// `w_H = K grad_perp psi`, `w3 = (2 pi/sigma) y_perp . w_H`.
pub fn velocity_from_stream(psi: &ScalarField, sp: SigmaParam) -> VectorField3 {
    let g = psi.grid();
    let (p1, p2) = perp_gradient(psi);
    let s = sp.coupling();
    let mut w1 = vec![0.0; g.len()];
    let mut w2 = vec![0.0; g.len()];
    let mut w3 = vec![0.0; g.len()];
    for j in 0..g.n_rings() {
        for k in 0..g.n_theta {
            let i = g.idx(j, k);
            let (y1, y2) = g.point(j, k);
            let m = metric_k(y1, y2, sp);
            w1[i] = m[0] * p1[i] + m[1] * p2[i];
            w2[i] = m[1] * p1[i] + m[2] * p2[i];
            w3[i] = s * (-y2 * w1[i] + y1 * w2[i]);
        }
    }
    VectorField3 {
        w1: ScalarField::from_values(g, w1),
        w2: ScalarField::from_values(g, w2),
        w3: ScalarField::from_values(g, w3),
    }
}

/// `grad_perp(psi) . grad(vort)`.
pub fn stream_transport(vort: &ScalarField, psi: &ScalarField) -> ScalarField {
    let g = vort.grid();
    let (p1, p2) = perp_gradient(psi);
    let d = gradient(vort);
    let (a, b) = (d.w1.phys(), d.w2.phys());
    ScalarField::from_values(g, (0..g.len()).map(|i| p1[i] * a[i] + p2[i] * b[i]).collect())
}

/// `w_H . grad(vort) + (2 pi/sigma)^2 (y_perp . w_H) E vort`, the transport
/// term written with the velocity instead of the stream function.
pub fn velocity_transport(vort: &ScalarField, w: &VectorField3, sp: SigmaParam) -> ScalarField {
    let g = vort.grid();
    let d = gradient(vort);
    let (a, b) = (d.w1.phys(), d.w2.phys());
    let (w1, w2) = (w.w1.phys(), w.w2.phys());
    let yp = perp_dot(g, w).into_values();
    let ev = apply_e(vort).into_values();
    let s2 = sp.coupling_sq();
    ScalarField::from_values(
        g,
        (0..g.len())
            .map(|i| w1[i] * a[i] + w2[i] * b[i] + s2 * yp[i] * ev[i])
            .collect(),
    )
}

/// `w_H . H grad(vort)`, pointwise with the metric matrix.
pub fn metric_transport(vort: &ScalarField, w: &VectorField3, sp: SigmaParam) -> ScalarField {
    let g = vort.grid();
    let d = gradient(vort);
    let (a, b) = (d.w1.phys(), d.w2.phys());
    let (w1, w2) = (w.w1.phys(), w.w2.phys());
    let mut out = vec![0.0; g.len()];
    for j in 0..g.n_rings() {
        for k in 0..g.n_theta {
            let i = g.idx(j, k);
            let (y1, y2) = g.point(j, k);
            let h = metric_h(y1, y2, sp);
            out[i] = w1[i] * (h[0] * a[i] + h[1] * b[i]) + w2[i] * (h[1] * a[i] + h[2] * b[i]);
        }
    }
    ScalarField::from_values(g, out)
}

/// Conserved quantities of the vorticity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VortexNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// `int grad psi . K grad psi`
    pub energy: f64,
}

#[derive(Debug)]
pub struct EulerSolver {
    grid: Arc<DiskGrid>,
    sp: SigmaParam,
    lh: LhSolver,
    dt: f64,
    cfl: f64,
    dealias: bool,
}

impl EulerSolver {
    pub fn new(grid: &Arc<DiskGrid>, sp: SigmaParam, cfg: &EulerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            grid: Arc::clone(grid),
            sp,
            lh: LhSolver::new(grid, sp),
            dt: cfg.dt,
            cfl: cfg.cfl,
            dealias: cfg.dealias,
        })
    }

    pub fn initial_state(&self, vort0: &ScalarField) -> EulerState {
        EulerState {
            psi: self.lh.solve(vort0),
            vort: vort0.clone(),
            t: 0.0,
            sp: self.sp,
        }
    }

    pub fn solve_stream(&self, vort: &ScalarField) -> ScalarField {
        self.lh.solve(vort)
    }

    fn rhs(&self, vort: &ScalarField) -> (ScalarField, ScalarField) {
        let v = if self.dealias { vort.dealiased() } else { vort.clone() };
        let psi = self.lh.solve(&v);
        let t = stream_transport(&v, &psi).scale(-1.0);
        let t = if self.dealias { t.dealiased() } else { t };
        (t, psi)
    }

    pub fn cfl_number(&self, psi: &ScalarField) -> f64 {
        let g = &self.grid;
        let (p1, p2) = perp_gradient(psi);
        let mmax = g.dealias_cutoff() as f64;
        let mut worst = 0.0f64;
        for j in 0..g.n_r {
            for k in 0..g.n_theta {
                let i = g.idx(j, k);
                let (c, s) = (g.cos_theta(k), g.sin_theta(k));
                let ur = c * p1[i] + s * p2[i];
                let ut = -s * p1[i] + c * p2[i];
                worst = worst.max(ur.abs() / g.dr + ut.abs() * mmax / g.r[j]);
            }
        }
        worst * self.dt
    }

    /// One SSP-RK3 step; the stream function is refreshed at every stage.
    pub fn step(&self, state: &EulerState) -> Result<EulerState> {
        let cfl = self.cfl_number(&state.psi);
        if cfl > self.cfl {
            return Err(HelixError::Cfl {
                dt: self.dt,
                limit: self.dt * self.cfl / cfl,
            });
        }
        let dt = self.dt;
        let v0 = &state.vort;
        let (k1, _) = self.rhs(v0);
        let v1 = v0.zip_with(&k1, |a, b| a + dt * b)?;
        let (k2, _) = self.rhs(&v1);
        let v2 = v0.zip_with(&v1, |a, b| 0.75 * a + 0.25 * b)?;
        let v2 = v2.zip_with(&k2, |a, b| a + 0.25 * dt * b)?;
        let (k3, _) = self.rhs(&v2);
        let v3 = v0.zip_with(&v2, |a, b| a / 3.0 + 2.0 / 3.0 * b)?;
        let vort = v3.zip_with(&k3, |a, b| a + 2.0 / 3.0 * dt * b)?;
        let psi = self.lh.solve(&vort);
        Ok(EulerState {
            vort,
            psi,
            t: state.t + dt,
            sp: self.sp,
        })
    }

    pub fn norms(&self, state: &EulerState) -> VortexNorms {
        let g = &self.grid;
        let d = gradient(&state.psi);
        let (a, b) = (d.w1.phys(), d.w2.phys());
        let mut e = vec![0.0; g.len()];
        for j in 0..g.n_rings() {
            for k in 0..g.n_theta {
                let i = g.idx(j, k);
                let (y1, y2) = g.point(j, k);
                let m = metric_k(y1, y2, self.sp);
                e[i] = a[i] * (m[0] * a[i] + m[1] * b[i]) + b[i] * (m[1] * a[i] + m[2] * b[i]);
            }
        }
        let one = ScalarField::constant(g, 1.0);
        VortexNorms {
            l1: lp_norm(&state.vort, 1.0).expect("p >= 1"),
            l2: lp_norm(&state.vort, 2.0).expect("p >= 1"),
            linf: state.vort.max_abs(),
            energy: l2_inner(&ScalarField::from_values(g, e), &one).expect("same grid"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EulerRun {
    pub snapshots: Vec<EulerState>,
    /// Norms at every step, `t = 0` included.
    pub norms: Vec<(f64, VortexNorms)>,
}

impl EulerRun {
    pub fn final_state(&self) -> &EulerState {
        self.snapshots.last().expect("at least the initial snapshot")
    }

    /// Largest relative drift of each conserved norm over the run.
    pub fn max_drift(&self) -> VortexNorms {
        let first = self.norms[0].1;
        let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b.abs() };
        self.norms.iter().fold(
            VortexNorms {
                l1: 0.0,
                l2: 0.0,
                linf: 0.0,
                energy: 0.0,
            },
            |acc, (_, n)| VortexNorms {
                l1: acc.l1.max(rel(n.l1, first.l1)),
                l2: acc.l2.max(rel(n.l2, first.l2)),
                linf: acc.linf.max(rel(n.linf, first.linf)),
                energy: acc.energy.max(rel(n.energy, first.energy)),
            },
        )
    }
}

pub fn run_euler(vort0: &ScalarField, sp: SigmaParam, cfg: &EulerConfig) -> Result<EulerRun> {
    let solver = EulerSolver::new(vort0.grid(), sp, cfg)?;
    let max = vort0.max_abs_all();
    if !max.is_finite() {
        return Err(HelixError::Precondition("initial vorticity is not bounded".into()));
    }
    let mut state = solver.initial_state(vort0);
    let mut norms = vec![(0.0, solver.norms(&state))];
    let mut snapshots = vec![state.clone()];
    let steps = cfg.n_steps();
    for i in 1..=steps {
        state = solver.step(&state)?;
        norms.push((state.t, solver.norms(&state)));
        if i % cfg.snapshot_every == 0 || i == steps {
            snapshots.push(state.clone());
        }
    }
    Ok(EulerRun { snapshots, norms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::l2_norm;
    use crate::grid::build_grid;
    use crate::operators::constraint_residual;

    #[test]
    fn velocity_of_quadratic_stream() {
        let g = build_grid(32, 32).unwrap();
        let psi = ScalarField::from_fn(&g, |a, b| 1.0 - a * a - b * b);
        let w = velocity_from_stream(&psi, SigmaParam::Planar);
        let want = VectorField3::from_fn(&g, |a, b| [2.0 * b, -2.0 * a, 0.0]);
        assert!(w.sub(&want).unwrap().max_norm() < 1e-11);
        // alpha = 1 at y = (1/2, 0), which is node (16, 0) when n_r = 33:
        // grad_perp psi = (0, -1), K = [[1, 0], [0, 0.8]], y_perp = (0, 1/2)
        let g = build_grid(33, 32).unwrap();
        let psi = ScalarField::from_fn(&g, |a, b| 1.0 - a * a - b * b);
        let sp = SigmaParam::finite(2.0 * std::f64::consts::PI).unwrap();
        let w = velocity_from_stream(&psi, sp);
        let i = g.idx(16, 0);
        assert!((g.r[16] - 0.5).abs() < 1e-15);
        assert!(w.w1.phys()[i].abs() < 1e-12);
        assert!((w.w2.phys()[i] + 0.8).abs() < 1e-12);
        assert!((w.w3.phys()[i] + 0.4).abs() < 1e-12);
    }

    #[test]
    fn constructed_velocity_satisfies_constraint() {
        let g = build_grid(64, 64).unwrap();
        let sp = SigmaParam::finite(3.0).unwrap();
        let psi = ScalarField::from_fn(&g, |a, b| {
            (1.0 - a * a - b * b) * (1.0 + a + 0.5 * a * b) * (-(a * a)).exp()
        });
        let w = velocity_from_stream(&psi, sp);
        let res = l2_norm(&constraint_residual(&w, sp));
        assert!(res < 5e-3, "{res}");
    }

    #[test]
    fn transport_forms_agree() {
        let g = build_grid(32, 64).unwrap();
        let sp = SigmaParam::finite(4.0).unwrap();
        let vort = ScalarField::from_fn(&g, |a, b| (-((a - 0.3).powi(2) + b * b) / 0.05).exp());
        let psi = crate::metric::solve_lh(&vort, sp);
        let w = velocity_from_stream(&psi, sp);
        let a = stream_transport(&vort, &psi);
        let b = velocity_transport(&vort, &w, sp);
        let c = metric_transport(&vort, &w, sp);
        assert!(a.sub(&b).unwrap().max_abs_all() < 1e-10 * a.max_abs_all().max(1.0));
        assert!(a.sub(&c).unwrap().max_abs_all() < 1e-10 * a.max_abs_all().max(1.0));
    }

    #[test]
    fn constant_vorticity_is_stationary() {
        let g = build_grid(16, 32).unwrap();
        let v = ScalarField::constant(&g, 2.0);
        let cfg = EulerConfig {
            t_end: 0.05,
            ..Default::default()
        };
        let run = run_euler(&v, SigmaParam::finite(2.0).unwrap(), &cfg).unwrap();
        assert!(run.final_state().vort.sub(&v).unwrap().max_abs_all() < 1e-12);
    }

    #[test]
    fn zero_end_time() {
        let g = build_grid(16, 32).unwrap();
        let v = ScalarField::from_polar(&g, |r, _| 1.0 - r * r);
        let cfg = EulerConfig {
            t_end: 0.0,
            ..Default::default()
        };
        let sp = SigmaParam::finite(2.0).unwrap();
        let run = run_euler(&v, sp, &cfg).unwrap();
        assert_eq!(run.snapshots.len(), 1);
        let psi = crate::metric::solve_lh(&v, sp);
        assert!(run.final_state().psi.sub(&psi).unwrap().max_abs_all() < 1e-15);
    }
}
