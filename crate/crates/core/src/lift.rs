//! Correspondence between reduced fields on the disk and helical fields on the
//! periodic cylinder `D x [0, sigma)`.
//!
//! `u(x', x3) = M(x3) w(m(x3) x')` where `m(x3)` rotates by `+2 pi x3 / sigma`
//! and `M(x3)` rotates the horizontal components by `-2 pi x3 / sigma`. On the
//! polar grid the argument rotation is a per-mode phase shift, so lifting is
//! exact for band-limited data.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HelixError, Result};
use crate::euler::{velocity_from_stream, EulerState};
use crate::field::{inverse_real, ScalarField, VectorField3};
use crate::grid::DiskGrid;
use crate::operators::{apply_e_vec, grad_norm_sq, gradient, h1_seminorm};
use crate::sigma::SigmaParam;

pub const DEFAULT_LEVELS: usize = 32;

/// Samples of a helical field on `n_z` equally spaced levels `x3 = l sigma / n_z`.
#[derive(Clone, Debug)]
pub struct HelicalField3D {
    pub sigma: f64,
    pub levels: Vec<VectorField3>,
}

fn require_finite(sp: SigmaParam) -> Result<f64> {
    sp.sigma()
        .ok_or_else(|| HelixError::Precondition("helical lift needs a finite sigma".into()))
}

/// `f(r, theta + phi)` by shifting every azimuthal mode.
pub fn rotate_scalar(f: &ScalarField, phi: f64) -> ScalarField {
    let g = f.grid();
    let nyq = g.n_theta / 2;
    let mut m = f.spec().into_owned();
    for ring in m.chunks_mut(g.n_theta) {
        for (k, c) in ring.iter_mut().enumerate() {
            // the sine half of the Nyquist mode is invisible on the grid
            *c *= if k == nyq {
                Complex64::new((nyq as f64 * phi).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, g.wavenumber(k) as f64 * phi)
            };
        }
    }
    ScalarField::from_values(g, inverse_real(g, &m))
}

/// Horizontal components rotated by `phi` (counterclockwise), `w3` untouched.
fn rotate_components(w: &VectorField3, phi: f64) -> VectorField3 {
    let (c, s) = (phi.cos(), phi.sin());
    let (a, b) = (w.w1.phys(), w.w2.phys());
    let g = w.grid();
    VectorField3 {
        w1: ScalarField::from_values(g, a.iter().zip(b.iter()).map(|(x, y)| c * x - s * y).collect()),
        w2: ScalarField::from_values(g, a.iter().zip(b.iter()).map(|(x, y)| s * x + c * y).collect()),
        w3: w.w3.to_physical(),
    }
}

/// The slice of the lift at height `x3`.
pub fn lift_at(w: &VectorField3, sp: SigmaParam, x3: f64) -> Result<VectorField3> {
    let sigma = require_finite(sp)?;
    let phi = 2.0 * PI * x3 / sigma;
    let shifted = w.map_components(|c| rotate_scalar(c, phi));
    Ok(rotate_components(&shifted, -phi))
}

/// Scalar helical function `p(x) = q(m(x3) x')` at height `x3`.
pub fn lift_scalar_at(q: &ScalarField, sp: SigmaParam, x3: f64) -> Result<ScalarField> {
    let sigma = require_finite(sp)?;
    Ok(rotate_scalar(q, 2.0 * PI * x3 / sigma))
}

pub fn lift(w: &VectorField3, sp: SigmaParam, n_z: usize) -> Result<HelicalField3D> {
    let sigma = require_finite(sp)?;
    if n_z == 0 {
        return Err(HelixError::Precondition("n_z must be >= 1".into()));
    }
    let levels = (0..n_z)
        .into_par_iter()
        .map(|l| lift_at(w, sp, l as f64 * sigma / n_z as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(HelicalField3D { sigma, levels })
}

/// The slice at `x3 = 0`.
pub fn restrict(u: &HelicalField3D) -> VectorField3 {
    u.levels[0].clone()
}

impl HelicalField3D {
    pub fn n_z(&self) -> usize {
        self.levels.len()
    }

    pub fn dz(&self) -> f64 {
        self.sigma / self.n_z() as f64
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        self.levels[0].grid()
    }

    pub fn sp(&self) -> SigmaParam {
        SigmaParam::Finite(self.sigma)
    }

    /// Recovers `w` from level `l` with `w(y) = M^T u(m^T y)`.
    pub fn restrict_level(&self, l: usize) -> VectorField3 {
        let phi = 2.0 * PI * l as f64 / self.n_z() as f64;
        let back = rotate_components(&self.levels[l], phi);
        back.map_components(|c| rotate_scalar(c, -phi))
    }

    /// Max over samples of `|u(S(rho) x) - M(rho) u(x)|` for the group element
    /// that shifts `x3` by `shift` levels. The matching rotation must map grid
    /// nodes to grid nodes, i.e. `shift * n_theta` divisible by `n_z`.
    pub fn invariance_error(&self, shift: usize) -> Result<f64> {
        let g = self.grid();
        let nz = self.n_z();
        if (shift * g.n_theta) % nz != 0 {
            return Err(HelixError::Precondition(format!(
                "shift of {shift} levels is not a grid rotation for n_theta = {}, n_z = {nz}",
                g.n_theta
            )));
        }
        let dk = shift * g.n_theta / nz;
        let rho = 2.0 * PI * shift as f64 / nz as f64;
        let (c, s) = (rho.cos(), rho.sin());
        let mut worst = 0.0f64;
        for l in 0..nz {
            let here = &self.levels[l];
            let there = &self.levels[(l + shift) % nz];
            let (a1, a2, a3) = (here.w1.phys(), here.w2.phys(), here.w3.phys());
            let (b1, b2, b3) = (there.w1.phys(), there.w2.phys(), there.w3.phys());
            for j in 0..g.n_rings() {
                for k in 0..g.n_theta {
                    let i = g.idx(j, k);
                    // S(rho) turns x' clockwise by rho
                    let i2 = g.idx(j, (k + g.n_theta - dk) % g.n_theta);
                    let m1 = c * a1[i] + s * a2[i];
                    let m2 = -s * a1[i] + c * a2[i];
                    let e = (b1[i2] - m1).abs().max((b2[i2] - m2).abs()).max((b3[i2] - a3[i]).abs());
                    worst = worst.max(e);
                }
            }
        }
        Ok(worst)
    }

    /// `|u|_{L2}^2` over the cylinder by the periodic trapezoid rule in `x3`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.levels.iter().map(|u| u.l2_norm_sq()).sum::<f64>() * self.dz()
    }

    /// `|grad_H u|_{L2}^2` over the cylinder.
    pub fn grad_h_norm_sq(&self) -> f64 {
        self.levels
            .par_iter()
            .map(|u| u.components().iter().map(|c| grad_norm_sq(c)).sum::<f64>())
            .sum::<f64>()
            * self.dz()
    }

    /// Centered periodic difference in `x3` at level `l`.
    pub fn d3_fd(&self, l: usize) -> VectorField3 {
        let nz = self.n_z();
        let up = &self.levels[(l + 1) % nz];
        let dn = &self.levels[(l + nz - 1) % nz];
        let h = 2.0 * self.dz();
        up.sub(dn).expect("same grid").scale(1.0 / h)
    }

    /// `max |u . xi| / (|u| |xi|)` over interior samples, `xi = (x2, -x1, sigma / 2 pi)`.
    pub fn no_swirl_residual(&self) -> f64 {
        let g = self.grid();
        let alpha = self.sigma / (2.0 * PI);
        let mut worst = 0.0f64;
        for u in &self.levels {
            let (a, b, c) = (u.w1.phys(), u.w2.phys(), u.w3.phys());
            for j in 0..g.n_r {
                for k in 0..g.n_theta {
                    let i = g.idx(j, k);
                    let (x1, x2) = g.point(j, k);
                    let dot = a[i] * x2 - b[i] * x1 + c[i] * alpha;
                    let nu = (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt();
                    let nx = (x1 * x1 + x2 * x2 + alpha * alpha).sqrt();
                    if nu > 0.0 {
                        worst = worst.max(dot.abs() / (nu * nx));
                    }
                }
            }
        }
        worst
    }

    /// Max over interior samples of the 3D divergence, `x3` derivative by
    /// centered differences.
    pub fn divergence_max(&self) -> f64 {
        let g = self.grid();
        (0..self.n_z())
            .into_par_iter()
            .map(|l| {
                let u = &self.levels[l];
                let d1 = gradient(&u.w1).w1;
                let d2 = gradient(&u.w2).w2;
                let d3 = self.d3_fd(l).w3;
                let (a, b, c) = (d1.phys(), d2.phys(), d3.phys());
                (0..g.interior_len())
                    .map(|i| (a[i] + b[i] + c[i]).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// The exact `x3` derivative of the lift as a reduced field:
/// `(2 pi / sigma) (E w_H - w_H^perp, E w3)`. Lifting it gives `d3 u`.
pub fn d3_reduced(w: &VectorField3, sp: SigmaParam) -> Result<VectorField3> {
    require_finite(sp)?;
    let ew = apply_e_vec(w);
    let perp = w.horizontal_perp();
    Ok(ew.sub(&perp)?.scale(sp.coupling()))
}

#[derive(Clone, Copy, Debug)]
pub struct ScalingReport {
    pub sigma: f64,
    pub u_l2: f64,
    pub w_l2: f64,
    /// `| |u| - sqrt(sigma) |w| | / (sqrt(sigma) |w|)`
    pub l2_rel_error: f64,
    /// `|u|` from the single-slice shortcut `sqrt(sigma) |u(x3 = 0)|`
    pub u_l2_slice: f64,
    pub grad_h_u: f64,
    pub grad_w: f64,
    /// `|grad_H u| / (sqrt(sigma) |grad w|)`, at most 1
    pub grad_ratio: f64,
    pub d3_u: f64,
    pub d3_u_fd: f64,
    pub w_h1: f64,
    /// `sqrt(sigma) |d3 u| / |w|_{H1}`, independent of sigma
    pub d3_constant: f64,
}

/// Bound on [`ScalingReport::d3_constant`]: `|E f| <= |grad f|` on the unit
/// disk, so `sqrt(sigma) |d3 u| <= 2 pi (|grad w| + |w|) <= 2 sqrt(2) pi |w|_{H1}`.
pub const D3_CONSTANT_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2 * PI;

impl ScalingReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.l2_rel_error <= tol
            && self.grad_ratio <= 1.0 + tol
            && self.d3_constant <= D3_CONSTANT_BOUND
    }
}

/// Norm identities and inequalities linking `w` and its lift.
pub fn verify_scalings(w0: &VectorField3, sp: SigmaParam, n_z: usize) -> Result<ScalingReport> {
    let sigma = require_finite(sp)?;
    let u = lift(w0, sp, n_z)?;
    let d3 = lift(&d3_reduced(w0, sp)?, sp, n_z)?;
    let u_l2 = u.l2_norm_sq().sqrt();
    let w_l2 = w0.l2_norm();
    let root = sigma.sqrt();
    let grad_h_u = u.grad_h_norm_sq().sqrt();
    let grad_w = h1_seminorm(w0);
    let d3_u = d3.l2_norm_sq().sqrt();
    let d3_u_fd = (0..u.n_z())
        .map(|l| u.d3_fd(l).l2_norm_sq())
        .sum::<f64>()
        .sqrt()
        * u.dz().sqrt();
    let w_h1 = (w_l2 * w_l2 + grad_w * grad_w).sqrt();
    let ratio = |a: f64, b: f64| if b == 0.0 { if a == 0.0 { 0.0 } else { f64::INFINITY } } else { a / b };
    Ok(ScalingReport {
        sigma,
        u_l2,
        w_l2,
        l2_rel_error: ratio((u_l2 - root * w_l2).abs(), root * w_l2),
        u_l2_slice: root * u.levels[0].l2_norm(),
        grad_h_u,
        grad_w,
        grad_ratio: ratio(grad_h_u, root * grad_w),
        d3_u,
        d3_u_fd,
        w_h1,
        d3_constant: ratio(root * d3_u, w_h1),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct VorticityReport {
    /// `max |curl u - (2 pi / sigma) omega3 xi| / max |curl u|`, omega3 being
    /// the computed axial component
    pub rel_error: f64,
    /// `max |curl u x xi| / max (|curl u| |xi|)`
    pub parallel_residual: f64,
    /// `max |omega3 - varpi(y(x))| / max |varpi|`. The velocity `K grad_perp psi`
    /// has `curl = div(J^T K J grad psi)`, which differs from `L_H psi` by a
    /// term of relative size `1 / (alpha^2 + 1)`.
    pub vort_mismatch: f64,
    pub max_curl: f64,
}

/// Lifts the velocity of an inviscid state and checks that its curl, computed
/// by differences on the 3D samples, has the form `(2 pi / sigma) omega3 xi`.
pub fn vorticity3d_check(state: &EulerState, sp: SigmaParam, n_z: usize) -> Result<VorticityReport> {
    let sigma = require_finite(sp)?;
    let w = velocity_from_stream(&state.psi, sp);
    let u = lift(&w, sp, n_z)?;
    let g = u.grid().clone();
    let alpha = sigma / (2.0 * PI);
    let s = sp.coupling();
    // error, |curl|, |curl x xi|, |curl| |xi|, |omega3 - varpi|, |varpi|
    let per_level: Vec<[f64; 6]> = (0..n_z)
        .into_par_iter()
        .map(|l| {
            let ul = &u.levels[l];
            let vort = lift_scalar_at(&state.vort, sp, l as f64 * u.dz()).expect("finite sigma");
            let (g1, g2, g3) = (gradient(&ul.w1), gradient(&ul.w2), gradient(&ul.w3));
            let d3 = u.d3_fd(l);
            let a2 = g1.w2.phys();
            let b1 = g2.w1.phys();
            let (c1, c2) = (g3.w1.phys(), g3.w2.phys());
            let (e1, e2) = (d3.w1.phys(), d3.w2.phys());
            let v = vort.phys();
            let mut acc = [0.0f64; 6];
            for j in 0..g.n_r {
                for k in 0..g.n_theta {
                    let i = g.idx(j, k);
                    let (x1, x2) = g.point(j, k);
                    let om = [c2[i] - e2[i], e1[i] - c1[i], b1[i] - a2[i]];
                    let xi = [x2, -x1, alpha];
                    let norm = |a: [f64; 3]| a.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let want = xi.map(|x| s * om[2] * x);
                    let cr = [
                        om[1] * xi[2] - om[2] * xi[1],
                        om[2] * xi[0] - om[0] * xi[2],
                        om[0] * xi[1] - om[1] * xi[0],
                    ];
                    let on = norm(om);
                    let row = [
                        norm([om[0] - want[0], om[1] - want[1], om[2] - want[2]]),
                        on,
                        norm(cr),
                        on * norm(xi),
                        (om[2] - v[i]).abs(),
                        v[i].abs(),
                    ];
                    for (a, x) in acc.iter_mut().zip(row) {
                        *a = a.max(x);
                    }
                }
            }
            acc
        })
        .collect();
    let m = per_level.iter().fold([0.0f64; 6], |mut m, t| {
        m.iter_mut().zip(t).for_each(|(a, &x)| *a = a.max(x));
        m
    });
    let safe = |a: f64, b: f64| if b == 0.0 { a } else { a / b };
    Ok(VorticityReport {
        rel_error: safe(m[0], m[1]),
        parallel_residual: safe(m[2], m[3]),
        vort_mismatch: safe(m[4], m[5]),
        max_curl: m[1],
    })
}
