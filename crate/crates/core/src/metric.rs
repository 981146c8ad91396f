//! Helical metric `K = I - y_perp y_perp^T / (alpha^2 + |y|^2)`, its inverse
//! `H = I + y_perp y_perp^T / alpha^2`, and the stream-function operator
//! `L_H = div(K grad)`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::field::{inverse_real, ScalarField};
use crate::grid::DiskGrid;
use crate::operators::apply_modes;
use crate::radial::{column, radial_operator, set_column, OuterBc, RadialOp};
use crate::sigma::SigmaParam;

type C = Complex64;

/// Symmetric 2x2 matrix stored as `[a11, a12, a22]`.
pub type Sym2 = [f64; 3];

pub fn sym_mul(a: Sym2, b: Sym2) -> [[f64; 2]; 2] {
    [
        [a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[2]],
        [a[1] * b[0] + a[2] * b[1], a[1] * b[1] + a[2] * b[2]],
    ]
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
pub fn sym_eigenvalues(a: Sym2) -> (f64, f64) {
    let m = 0.5 * (a[0] + a[2]);
    let d = (0.25 * (a[0] - a[2]).powi(2) + a[1] * a[1]).sqrt();
    (m - d, m + d)
}

pub fn sym_spectral_norm(a: Sym2) -> f64 {
    let (l, h) = sym_eigenvalues(a);
    l.abs().max(h.abs())
}

pub fn metric_k(y1: f64, y2: f64, sp: SigmaParam) -> Sym2 {
    match sp.alpha() {
        None => [1.0, 0.0, 1.0],
        Some(a) => {
            let d = a * a + y1 * y1 + y2 * y2;
            // y_perp = (-y2, y1)
            [1.0 - y2 * y2 / d, y1 * y2 / d, 1.0 - y1 * y1 / d]
        }
    }
}

pub fn metric_h(y1: f64, y2: f64, sp: SigmaParam) -> Sym2 {
    match sp.alpha() {
        None => [1.0, 0.0, 1.0],
        Some(a) => {
            let d = a * a;
            [1.0 + y2 * y2 / d, -y1 * y2 / d, 1.0 + y1 * y1 / d]
        }
    }
}

/// `K`, `H` and `F = K - I` at every node, boundary ring included.
#[derive(Clone, Debug)]
pub struct MetricMatrices {
    pub grid: Arc<DiskGrid>,
    pub sp: SigmaParam,
    pub k: Vec<Sym2>,
    pub h: Vec<Sym2>,
    pub f: Vec<Sym2>,
}

pub fn eval_metric(grid: &Arc<DiskGrid>, sp: SigmaParam) -> MetricMatrices {
    let mut k = Vec::with_capacity(grid.len());
    let mut h = Vec::with_capacity(grid.len());
    let mut f = Vec::with_capacity(grid.len());
    for j in 0..grid.n_rings() {
        for t in 0..grid.n_theta {
            let (y1, y2) = grid.point(j, t);
            let kk = metric_k(y1, y2, sp);
            k.push(kk);
            h.push(metric_h(y1, y2, sp));
            f.push([kk[0] - 1.0, kk[1], kk[2] - 1.0]);
        }
    }
    MetricMatrices {
        grid: Arc::clone(grid),
        sp,
        k,
        h,
        f,
    }
}

impl MetricMatrices {
    /// Max entrywise deviation of `H K` from the identity.
    pub fn hk_identity_error(&self) -> f64 {
        self.h
            .iter()
            .zip(&self.k)
            .map(|(&h, &k)| {
                let p = sym_mul(h, k);
                (p[0][0] - 1.0)
                    .abs()
                    .max(p[0][1].abs())
                    .max(p[1][0].abs())
                    .max((p[1][1] - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Max over all nodes of the spectral norm of `F`.
    pub fn max_f_norm(&self) -> f64 {
        self.f.iter().map(|&f| sym_spectral_norm(f)).fold(0.0, f64::max)
    }

    /// Max spectral norm of `F` on the boundary ring `|y| = 1`.
    pub fn boundary_f_norm(&self) -> f64 {
        let g = &self.grid;
        self.f[g.interior_len()..]
            .iter()
            .map(|&f| sym_spectral_norm(f))
            .fold(0.0, f64::max)
    }

    /// Smallest and largest eigenvalue of `K` over all nodes.
    pub fn k_spectrum(&self) -> (f64, f64) {
        self.k.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &k| {
            let (a, b) = sym_eigenvalues(k);
            (lo.min(a), hi.max(b))
        })
    }
}

/// Exact value of `max_D |K - I|`, attained at `|y| = 1`.
pub fn f_norm_bound(sp: SigmaParam) -> f64 {
    match sp.alpha() {
        None => 0.0,
        Some(a) => 1.0 / (a * a + 1.0),
    }
}

fn lh_operators(grid: &DiskGrid, sp: SigmaParam, bc: OuterBc) -> Vec<RadialOp> {
    let a2 = sp.alpha().map(|a| a * a);
    (0..grid.n_theta)
        .into_par_iter()
        .map(|k| {
            let m2 = (grid.wavenumber(k) as f64).powi(2);
            radial_operator(grid, bc, |j| {
                let r2 = grid.r[j] * grid.r[j];
                match a2 {
                    Some(a2) => -m2 * a2 / (r2 * (a2 + r2)),
                    None => -m2 / r2,
                }
            })
        })
        .collect()
}

/// `div(K grad psi)` with the boundary ring of `psi` as Dirichlet data.
pub fn apply_lh(psi: &ScalarField, sp: SigmaParam) -> ScalarField {
    let g = psi.grid();
    let ops = lh_operators(g, sp, OuterBc::Dirichlet);
    let out = apply_modes(g, &ops, &psi.spec());
    ScalarField::from_values(g, inverse_real(g, &out))
}

/// Per-mode factorizations of `L_H` with zero Dirichlet data.
#[derive(Clone, Debug)]
pub struct LhSolver {
    grid: Arc<DiskGrid>,
    lu: Vec<crate::radial::TridiagLu>,
}

impl LhSolver {
    pub fn new(grid: &Arc<DiskGrid>, sp: SigmaParam) -> Self {
        let lu = lh_operators(grid, sp, OuterBc::Dirichlet)
            .iter()
            .map(|op| op.tri.factor())
            .collect();
        Self {
            grid: Arc::clone(grid),
            lu,
        }
    }

    pub fn solve(&self, vort: &ScalarField) -> ScalarField {
        let g = &self.grid;
        let n = g.n_r;
        let b = vort.spec();
        let cols: Vec<Vec<C>> = self
            .lu
            .par_iter()
            .enumerate()
            .map(|(k, lu)| {
                let mut x = column(g, &b, k)[..n].to_vec();
                lu.solve(&mut x);
                x.push(C::new(0.0, 0.0));
                x
            })
            .collect();
        let mut out = vec![C::new(0.0, 0.0); g.len()];
        for (k, c) in cols.iter().enumerate() {
            set_column(g, &mut out, k, c);
        }
        ScalarField::from_values(g, inverse_real(g, &out))
    }
}

/// Unique `psi` with zero boundary value and `L_H psi = vort`.
pub fn solve_lh(vort: &ScalarField, sp: SigmaParam) -> ScalarField {
    LhSolver::new(vort.grid(), sp).solve(vort)
}
