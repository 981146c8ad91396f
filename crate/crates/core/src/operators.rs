//! Differential operators on the disk: `E = y_perp . grad = d/dtheta`, the
//! gradient, horizontal divergence, Laplacian, the constraint residual and the
//! pressure operator `A A* = -Lap - (2 pi/sigma)^2 E^2`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HelixError, Result};
use crate::field::{inverse_real, l2_norm, ScalarField, VectorField3};
use crate::grid::DiskGrid;
use crate::radial::{
    column, extrapolate_trace, radial_derivative, radial_operator, set_column, OuterBc, RadialOp,
};
use crate::sigma::SigmaParam;
use crate::staggered::ConstraintOp;

type C = Complex64;

/// Tolerance on the normalized mean of a Neumann right-hand side.
pub const MEAN_ZERO_TOL: f64 = 1e-8;

/// `E f`, exact per azimuthal mode (`i m` times the coefficient).
pub fn apply_e(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let mut m = f.spec().into_owned();
    for j in 0..g.n_rings() {
        for k in 0..g.n_theta {
            m[g.idx(j, k)] *= C::new(0.0, g.deriv_wavenumber(k));
        }
    }
    ScalarField::from_values(g, inverse_real(g, &m))
}

/// Cartesian gradient on every ring; the third component is zero.
pub fn gradient(f: &ScalarField) -> VectorField3 {
    let g = f.grid();
    let v = f.phys();
    let dr = radial_derivative(g, &v);
    let dth = apply_e(f).into_values();
    let mut g1 = vec![0.0; g.len()];
    let mut g2 = vec![0.0; g.len()];
    for j in 0..g.n_rings() {
        let inv_r = 1.0 / g.r[j];
        for k in 0..g.n_theta {
            let i = g.idx(j, k);
            let (c, s) = (g.cos_theta(k), g.sin_theta(k));
            g1[i] = c * dr[i] - s * inv_r * dth[i];
            g2[i] = s * dr[i] + c * inv_r * dth[i];
        }
    }
    VectorField3 {
        w1: ScalarField::from_values(g, g1),
        w2: ScalarField::from_values(g, g2),
        w3: ScalarField::zeros(g),
    }
}

/// `div w_H`; the third component is ignored.
pub fn divergence_h(v: &VectorField3) -> ScalarField {
    ConstraintOp::new(v.grid(), 0.0).residual(v, false)
}

/// `div w_H + (2 pi/sigma) E w3`.
pub fn constraint_residual(w: &VectorField3, sp: SigmaParam) -> ScalarField {
    ConstraintOp::new(w.grid(), sp.coupling()).residual(w, true)
}

/// Per-mode radial operators `(1/r)(r f')' - (m^2/r^2 + extra(k)) f`.
pub(crate) fn mode_operators(
    grid: &DiskGrid,
    bc: OuterBc,
    extra: impl Fn(usize) -> f64 + Sync,
) -> Vec<RadialOp> {
    (0..grid.n_theta)
        .into_par_iter()
        .map(|k| {
            let m = grid.wavenumber(k) as f64;
            let e = extra(k);
            radial_operator(grid, bc, |j| -(m * m) / (grid.r[j] * grid.r[j]) - e)
        })
        .collect()
}

/// Applies per-mode operators to mode data; the output boundary ring is
/// extrapolated from the interior.
pub(crate) fn apply_modes(grid: &DiskGrid, ops: &[RadialOp], modes: &[C]) -> Vec<C> {
    let n = grid.n_r;
    let mut out = vec![C::new(0.0, 0.0); grid.len()];
    for (k, op) in ops.iter().enumerate() {
        let col = column(grid, modes, k);
        let mut res = op.apply(&col, col[n]);
        res.push(extrapolate_trace(res[n - 1], res[n - 2], res[n - 3]));
        set_column(grid, &mut out, k, &res);
    }
    out
}

/// Polar Laplacian using the field's own boundary ring as Dirichlet data.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let ops = mode_operators(g, OuterBc::Dirichlet, |_| 0.0);
    let out = apply_modes(g, &ops, &f.spec());
    ScalarField::from_values(g, inverse_real(g, &out))
}

/// `A A* f = -Lap f - (2 pi/sigma)^2 E^2 f` with the field's boundary ring
/// as Dirichlet data.
pub fn apply_pressure_operator(f: &ScalarField, sp: SigmaParam) -> ScalarField {
    let g = f.grid();
    let s2 = sp.coupling_sq();
    let ops = mode_operators(g, OuterBc::Dirichlet, |k| {
        let m = g.deriv_wavenumber(k);
        s2 * m * m
    });
    let out: Vec<C> = apply_modes(g, &ops, &f.spec()).iter().map(|v| -v).collect();
    ScalarField::from_values(g, inverse_real(g, &out))
}

/// Solves `A A* f = rhs` per mode. Dirichlet data is zero; the Neumann
/// solution is normalized to zero mean and needs a mean-zero rhs.
pub fn solve_pressure_poisson(
    rhs: &ScalarField,
    sp: SigmaParam,
    bc: OuterBc,
) -> Result<ScalarField> {
    let g = rhs.grid();
    let n = g.n_r;
    if bc == OuterBc::Neumann {
        check_mean_zero(rhs)?;
    }
    let s2 = sp.coupling_sq();
    let ops = mode_operators(g, bc, |k| {
        let m = g.deriv_wavenumber(k);
        s2 * m * m
    });
    let b = rhs.spec();
    let cols: Vec<Vec<C>> = ops
        .par_iter()
        .enumerate()
        .map(|(k, op)| {
            let mut t = op.tri.shifted(0.0, -1.0);
            let mut x: Vec<C> = column(g, &b, k)[..n].to_vec();
            if bc == OuterBc::Neumann && k == 0 {
                t.pin_row(0);
                t.lower[1] = C::new(0.0, 0.0);
                x[0] = C::new(0.0, 0.0);
            }
            t.factor().solve(&mut x);
            let tr = match bc {
                OuterBc::Dirichlet => C::new(0.0, 0.0),
                OuterBc::Neumann => (x[n - 1] * 9.0 - x[n - 2]) / 8.0,
            };
            x.push(tr);
            x
        })
        .collect();
    let mut out = vec![C::new(0.0, 0.0); g.len()];
    for (k, c) in cols.iter().enumerate() {
        set_column(g, &mut out, k, c);
    }
    let f = ScalarField::from_values(g, inverse_real(g, &out));
    if bc == OuterBc::Neumann {
        let mean = f.mean();
        return Ok(f.map(|x| x - mean));
    }
    Ok(f)
}

/// Mean of `f / |f|_L2`; zero for the zero field.
pub fn normalized_mean(f: &ScalarField) -> f64 {
    let norm = l2_norm(f);
    if norm == 0.0 {
        0.0
    } else {
        f.mean() / norm
    }
}

pub(crate) fn check_mean_zero(f: &ScalarField) -> Result<()> {
    let m = normalized_mean(f);
    if m.abs() > MEAN_ZERO_TOL {
        return Err(HelixError::NonZeroMean(m));
    }
    Ok(())
}

/// `|grad f|^2_L2` using [`gradient`].
pub fn grad_norm_sq(f: &ScalarField) -> f64 {
    let d = gradient(f);
    crate::field::l2_inner(&d.w1, &d.w1).expect("same grid")
        + crate::field::l2_inner(&d.w2, &d.w2).expect("same grid")
}

/// `H^1` seminorm of a vector field, all three components.
pub fn h1_seminorm(w: &VectorField3) -> f64 {
    w.components().iter().map(|c| grad_norm_sq(c)).sum::<f64>().sqrt()
}

/// `y_perp . v_H = -y2 v1 + y1 v2`, pointwise on every ring.
pub fn perp_dot(grid: &Arc<DiskGrid>, v: &VectorField3) -> ScalarField {
    let a = v.w1.phys();
    let b = v.w2.phys();
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.n_rings() {
        for k in 0..grid.n_theta {
            let (y1, y2) = grid.point(j, k);
            let i = grid.idx(j, k);
            out[i] = -y2 * a[i] + y1 * b[i];
        }
    }
    ScalarField::from_values(grid, out)
}

/// Helper for tests and diagnostics: `E` applied componentwise.
pub fn apply_e_vec(w: &VectorField3) -> VectorField3 {
    w.map_components(apply_e)
}
