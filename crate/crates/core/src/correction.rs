//! Divergence solve with zero boundary values (Bogovskii-type) and the
//! corrections between planar divergence-free data and helical data.
//!
//! Among all discrete fields `v` with zero boundary value and prescribed face
//! divergence, the solve returns the one of least Dirichlet energy. Per polar
//! slot `k` the unknowns are `P = u_r + i u_theta` and `Q = u_r - i u_theta`,
//! which are the Cartesian modes `k + 1` of `w1 + i w2` and `k - 1` of
//! `w1 - i w2`, so the energy is a pair of tridiagonal forms. The multiplier
//! system `B G^-1 B^H` is dense in the face index and solved by LU.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dense::DenseLu;
use crate::error::{HelixError, Result};
use crate::field::{forward_real, inverse_real, l2_norm, ScalarField, VectorField3};
use crate::grid::DiskGrid;
use crate::operators::{apply_e, check_mean_zero, constraint_residual, divergence_h, h1_seminorm};
use crate::radial::{column, Tridiag, TridiagLu};
use crate::sigma::SigmaParam;
use crate::staggered::{from_polar, nodes_to_faces, polar_modes, ConstraintOp};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Face residual accepted from the dense solve, relative to the target.
pub const SOLVE_TOL: f64 = 1e-9;

/// Relative size of `|A w|_L2 / |grad w|_L2` accepted as "zero to grid
/// order" by the correction preconditions.
pub const PRECONDITION_TOL: f64 = 0.05;

/// `|E w3| / |w3|` below which `w3` counts as radial.
const RADIAL_TOL: f64 = 1e-13;

/// Dirichlet energy `|grad f|^2` of one Cartesian mode `m`, as the
/// symmetric tridiagonal form `r_j dr (-(1/r)(r f')' + m^2/r^2 f)` with a
/// two-point flux to the zero boundary value.
fn energy_form(grid: &DiskGrid, m: f64) -> Tridiag {
    let n = grid.n_r;
    let h = grid.dr;
    let r = &grid.r;
    let mut t = Tridiag::zeros(n);
    for j in 0..n {
        let rin = j as f64 * h;
        let rout = (j + 1) as f64 * h;
        let mut d = m * m / (r[j] * r[j]) * r[j] * h;
        if j > 0 {
            t.lower[j] = C::new(-rin / h, 0.0);
            d += rin / h;
        }
        if j + 1 < n {
            t.upper[j] = C::new(-rout / h, 0.0);
            d += rout / h;
        } else {
            d += 2.0 / h;
        }
        t.diag[j] = C::new(d, 0.0);
    }
    t
}

/// Minimal-energy divergence solver for one grid.
#[derive(Debug)]
pub struct Bogovskii {
    grid: Arc<DiskGrid>,
    planar: ConstraintOp,
}

struct SlotRows {
    first: usize,
    bp: Vec<Vec<(usize, C)>>,
    bq: Vec<Vec<(usize, C)>>,
}

impl Bogovskii {
    pub fn new(grid: &Arc<DiskGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            planar: ConstraintOp::new(grid, 0.0),
        }
    }

    fn slot_rows(&self, k: usize) -> SlotRows {
        let (first, rows, _) = self.planar.rows(k);
        let half = 0.5;
        let mut bp = Vec::with_capacity(rows.len());
        let mut bq = Vec::with_capacity(rows.len());
        for row in rows {
            let mut p = Vec::new();
            let mut q = Vec::new();
            for &(j, c, a) in row {
                match c {
                    0 => {
                        p.push((j, a * half));
                        q.push((j, a * half));
                    }
                    1 => {
                        p.push((j, -I * a * half));
                        q.push((j, I * a * half));
                    }
                    _ => {}
                }
            }
            bp.push(p);
            bq.push(q);
        }
        SlotRows { first, bp, bq }
    }

    /// Solves slot `k` for face target `g` (active faces only). Returns the
    /// node columns of `u_r` and `u_theta`.
    fn solve_slot(&self, k: usize, g: &[C]) -> Result<(Vec<C>, Vec<C>)> {
        let grid = &self.grid;
        let n = grid.n_r;
        let m = grid.wavenumber(k) as f64;
        let rows = self.slot_rows(k);
        let nf = rows.bp.len();
        let gp: TridiagLu = energy_form(grid, m + 1.0).factor();
        let gq: TridiagLu = energy_form(grid, m - 1.0).factor();
        let mut xp = vec![ZERO; n * nf];
        let mut xq = vec![ZERO; n * nf];
        for l in 0..nf {
            let mut col = vec![ZERO; n];
            for &(j, a) in &rows.bp[l] {
                col[j] += a.conj();
            }
            gp.solve(&mut col);
            for j in 0..n {
                xp[j * nf + l] = col[j];
            }
            let mut col = vec![ZERO; n];
            for &(j, a) in &rows.bq[l] {
                col[j] += a.conj();
            }
            gq.solve(&mut col);
            for j in 0..n {
                xq[j * nf + l] = col[j];
            }
        }
        let mut s = vec![ZERO; nf * nf];
        for a in 0..nf {
            for l in 0..nf {
                let mut v = ZERO;
                for &(j, c) in &rows.bp[a] {
                    v += c * xp[j * nf + l];
                }
                for &(j, c) in &rows.bq[a] {
                    v += c * xq[j * nf + l];
                }
                s[a * nf + l] = v;
            }
        }
        let mut rhs = g.to_vec();
        if rows.first == 0 {
            // multipliers are defined up to the face-area vector for m = 0
            for l in 0..nf {
                s[l] = ZERO;
            }
            s[0] = C::new(1.0, 0.0);
            rhs[0] = ZERO;
        }
        let lambda = DenseLu::factor(nf, s)?.solve(&rhs);
        let mut p = vec![ZERO; n];
        let mut q = vec![ZERO; n];
        for j in 0..n {
            for l in 0..nf {
                p[j] += xp[j * nf + l] * lambda[l];
                q[j] += xq[j * nf + l] * lambda[l];
            }
        }
        let ur: Vec<C> = p.iter().zip(&q).map(|(a, b)| (a + b) * 0.5).collect();
        let ut: Vec<C> = p.iter().zip(&q).map(|(a, b)| (a - b) * (-0.5 * I)).collect();
        Ok((ur, ut))
    }

    /// Field with zero boundary value whose face divergence is `targets`
    /// (`[slot][face]`, faces `0..=n_r`).
    pub(crate) fn solve_faces(&self, targets: &[Vec<C>]) -> Result<VectorField3> {
        let g = &self.grid;
        let n = g.n_r;
        let cols: Vec<Result<(Vec<C>, Vec<C>)>> = (0..g.n_theta)
            .into_par_iter()
            .map(|k| {
                let (first, _, _) = self.planar.rows(k);
                let t = &targets[k][first..];
                if t.iter().all(|v| *v == ZERO) {
                    return Ok((vec![ZERO; n], vec![ZERO; n]));
                }
                self.solve_slot(k, t)
            })
            .collect();
        let mut ur = vec![ZERO; g.len()];
        let mut ut = vec![ZERO; g.len()];
        for (k, c) in cols.into_iter().enumerate() {
            let (a, b) = c?;
            for j in 0..n {
                ur[g.idx(j, k)] = a[j];
                ut[g.idx(j, k)] = b[j];
            }
        }
        let (w1, w2) = from_polar(g, &inverse_real(g, &ur), &inverse_real(g, &ut));
        let v = VectorField3 {
            w1: ScalarField::from_values(g, w1),
            w2: ScalarField::from_values(g, w2),
            w3: ScalarField::zeros(g),
        }
        .with_zero_trace();
        // audit the face divergence against the target
        let got = self.planar.face_values(&polar_modes(&v, false));
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in got.iter().zip(targets) {
            for (x, y) in a.iter().zip(b) {
                err = err.max((x - y).norm());
                scale = scale.max(y.norm());
            }
        }
        if err > SOLVE_TOL * scale.max(1.0) {
            return Err(HelixError::Solver {
                residual: err,
                tol: SOLVE_TOL * scale.max(1.0),
            });
        }
        Ok(v)
    }

    /// `v` with `v = 0` on the circle and `div v = f` at the nodes.
    pub fn solve(&self, f: &ScalarField) -> Result<VectorField3> {
        let g = &self.grid;
        g.check_same(f.grid())?;
        check_mean_zero(f)?;
        if l2_norm(f) == 0.0 {
            return Ok(VectorField3::zeros(g));
        }
        let geo = self.planar.geometry();
        let modes = forward_real(g, &f.phys());
        let targets: Vec<Vec<C>> = (0..g.n_theta)
            .map(|k| {
                let col = column(g, &modes, k);
                nodes_to_faces(&col[..g.n_r], g.is_axisymmetric(k), &geo.wf)
            })
            .collect();
        self.solve_faces(&targets)
    }
}

/// Minimal-energy `v` with zero boundary value and `div v = f`; `f` must have
/// zero mean.
pub fn bogovskii_solve(f: &ScalarField) -> Result<VectorField3> {
    Bogovskii::new(f.grid()).solve(f)
}

fn check_zero_trace(w: &VectorField3) -> Result<()> {
    let g = w.grid();
    let scale = w.components().iter().map(|c| c.max_abs_all()).fold(0.0, f64::max);
    let tr = w
        .components()
        .iter()
        .flat_map(|c| c.trace())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if tr > 1e-12 * scale.max(1.0) {
        return Err(HelixError::Precondition(format!(
            "field does not vanish on the boundary (max trace {tr:.3e}) on {}x{} grid",
            g.n_r, g.n_theta
        )));
    }
    Ok(())
}

fn check_small(res: &ScalarField, w: &VectorField3, what: &str) -> Result<()> {
    let r = l2_norm(res);
    let scale = h1_seminorm(w);
    if r > PRECONDITION_TOL * scale {
        return Err(HelixError::Precondition(format!(
            "{what} residual {r:.3e} exceeds {PRECONDITION_TOL} x |grad w| = {:.3e}",
            PRECONDITION_TOL * scale
        )));
    }
    Ok(())
}

/// Face divergence target `-(2 pi/sigma) E w3` per slot; identically zero
/// when `w3` is radial up to transform rounding.
fn sigma_targets(w: &VectorField3, sp: SigmaParam) -> Vec<Vec<C>> {
    let g = w.grid();
    if apply_e(&w.w3).max_abs_all() <= RADIAL_TOL * w.w3.max_abs_all() {
        return vec![vec![ZERO; g.n_r + 1]; g.n_theta];
    }
    let op = ConstraintOp::new(g, sp.coupling());
    let zeros = vec![ZERO; g.len()];
    let pm = [zeros.clone(), zeros, w.w3.spec().into_owned()];
    op.face_values(&pm)
        .into_iter()
        .map(|f| f.into_iter().map(|v| -v).collect())
        .collect()
}

/// Result of moving initial data between the planar and helical classes.
#[derive(Clone, Debug)]
pub struct Correction {
    pub field: VectorField3,
    /// Horizontal correction `v` (third component zero).
    pub v: VectorField3,
}

/// `w^sigma = w^inf + (v, 0)` with `div v = -(2 pi/sigma) E w3`. The
/// horizontal part of `w^inf` is first projected onto the exactly
/// divergence-free discrete fields, which moves it by a grid-order amount.
pub fn helical_correction(w_inf: &VectorField3, sp: SigmaParam) -> Result<Correction> {
    let g = w_inf.grid();
    check_zero_trace(w_inf)?;
    check_small(&divergence_h(w_inf), w_inf, "horizontal divergence")?;
    if sp.is_planar() {
        return Ok(Correction {
            field: w_inf.clone(),
            v: VectorField3::zeros(g),
        });
    }
    let (base, _) = ConstraintOp::new(g, 0.0).project(w_inf);
    let v = Bogovskii::new(g).solve_faces(&sigma_targets(&base, sp))?;
    let field = VectorField3 {
        w1: base.w1.add(&v.w1)?,
        w2: base.w2.add(&v.w2)?,
        w3: w_inf.w3.clone(),
    };
    Ok(Correction { field, v })
}

pub fn correct_initial_data_to_helical(w_inf: &VectorField3, sp: SigmaParam) -> Result<VectorField3> {
    helical_correction(w_inf, sp).map(|c| c.field)
}

/// `w~^inf = w^sigma - (v, 0)` with `div v = -(2 pi/sigma) E w3`. The input is
/// first projected onto the exact discrete constraint kernel.
pub fn planar_correction(w_sigma: &VectorField3, sp: SigmaParam) -> Result<Correction> {
    let g = w_sigma.grid();
    check_zero_trace(w_sigma)?;
    check_small(&constraint_residual(w_sigma, sp), w_sigma, "constraint")?;
    if sp.is_planar() {
        return Ok(Correction {
            field: w_sigma.clone(),
            v: VectorField3::zeros(g),
        });
    }
    let (base, _) = ConstraintOp::new(g, sp.coupling()).project(w_sigma);
    let v = Bogovskii::new(g).solve_faces(&sigma_targets(&base, sp))?;
    let field = VectorField3 {
        w1: base.w1.sub(&v.w1)?,
        w2: base.w2.sub(&v.w2)?,
        w3: base.w3.clone(),
    };
    Ok(Correction { field, v })
}

pub fn correct_initial_data_to_planar(w_sigma: &VectorField3, sp: SigmaParam) -> Result<VectorField3> {
    planar_correction(w_sigma, sp).map(|c| c.field)
}
