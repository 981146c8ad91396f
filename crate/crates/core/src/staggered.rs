//! Face-centred form of the constraint operator `A w = div w_H + (2 pi/sigma) E w3`.
//!
//! For one polar mode the radial velocity flux is differenced between
//! neighbouring nodes, so `A` lands on the cell faces `r = k dr` (the pole
//! face only for m = 0, the last face being the half cell next to `r = 1`).
//! `A A*` with the discrete adjoint is then tridiagonal in the face index,
//! and a projection through it leaves `A w` zero to rounding. Node values of
//! `A w` are linear interpolants of the face values.

use std::sync::Arc;

use num_complex::Complex64;

use crate::field::{forward_real, inverse_real, ScalarField, VectorField3};
use crate::grid::DiskGrid;
use crate::radial::{Tridiag, TridiagLu};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Face areas (per unit angle) and face radii.
#[derive(Clone, Debug)]
pub struct FaceGeometry {
    pub wf: Vec<f64>,
    pub rbar: Vec<f64>,
    pub wn: Vec<f64>,
}

impl FaceGeometry {
    pub fn new(grid: &DiskGrid) -> Self {
        let n = grid.n_r;
        let h = grid.dr;
        let r = &grid.r;
        let mut wf = vec![0.0; n + 1];
        let mut rbar = vec![0.0; n + 1];
        wf[0] = r[0] * r[0] / 2.0;
        for k in 1..n {
            rbar[k] = k as f64 * h;
            wf[k] = rbar[k] * h;
        }
        rbar[n] = 0.5 * (r[n - 1] + 1.0);
        wf[n] = 0.5 * (1.0 - r[n - 1] * r[n - 1]);
        let wn = (0..n).map(|j| grid.ring_weight(j)).collect();
        Self { wf, rbar, wn }
    }
}

/// Sparse rows of `A` for one azimuthal slot. Component 0 is `u_r`,
/// 1 is `u_theta`, 2 is `w3`.
#[derive(Clone, Debug)]
struct ModeRows {
    first: usize,
    rows: Vec<Vec<(usize, usize, C)>>,
    trace: [C; 3],
}

fn mode_rows(grid: &DiskGrid, geo: &FaceGeometry, k: usize, s: f64) -> ModeRows {
    let n = grid.n_r;
    let r = &grid.r;
    let m = grid.deriv_wavenumber(k);
    let axis = grid.is_axisymmetric(k);
    let mut rows = Vec::with_capacity(n + 1);
    if axis {
        rows.push(vec![(0, 0, C::new(r[0] / geo.wf[0], 0.0))]);
    }
    for f in 1..=n {
        let mut e = Vec::with_capacity(6);
        let th = I * (m / (2.0 * geo.rbar[f]));
        let w3 = I * (m * s / 2.0);
        if f < n {
            e.push((f, 0, C::new(r[f] / geo.wf[f], 0.0)));
            e.push((f, 1, th));
            e.push((f, 2, w3));
        }
        e.push((f - 1, 0, C::new(-r[f - 1] / geo.wf[f], 0.0)));
        e.push((f - 1, 1, th));
        e.push((f - 1, 2, w3));
        rows.push(e);
    }
    let trace = [
        C::new(1.0 / geo.wf[n], 0.0),
        I * (m / (2.0 * geo.rbar[n])),
        I * (m * s / 2.0),
    ];
    ModeRows {
        first: if axis { 0 } else { 1 },
        rows,
        trace,
    }
}

impl ModeRows {
    /// Face values of `A` applied to node columns (length n_r + 1, the last
    /// entry being the boundary value).
    fn apply(&self, cols: [&[C]; 3]) -> Vec<C> {
        let n = self.rows.len() + self.first - 1;
        let mut out = vec![ZERO; n + 1];
        for (i, row) in self.rows.iter().enumerate() {
            let f = i + self.first;
            let mut s = ZERO;
            for &(j, c, a) in row {
                s += a * cols[c][j];
            }
            if f == n {
                for c in 0..3 {
                    s += self.trace[c] * cols[c][n];
                }
            }
            out[f] = s;
        }
        out
    }

    /// `W_n^{-1} A^H p`, node columns (interior only).
    fn adjoint(&self, p: &[C], wn: &[f64]) -> [Vec<C>; 3] {
        let n = wn.len();
        let mut out = [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]];
        for (i, row) in self.rows.iter().enumerate() {
            let f = i + self.first;
            for &(j, c, a) in row {
                out[c][j] += a.conj() * p[f];
            }
        }
        for c in out.iter_mut() {
            for (v, w) in c.iter_mut().zip(wn) {
                *v /= *w;
            }
        }
        out
    }

    /// `A W_n^{-1} A^H` restricted to the active faces.
    fn gram(&self, wn: &[f64]) -> Tridiag {
        let nrow = self.rows.len();
        let mut t = Tridiag::zeros(nrow);
        for a in 0..nrow {
            for b in a.saturating_sub(1)..(a + 2).min(nrow) {
                let mut s = ZERO;
                for &(j, c, x) in &self.rows[a] {
                    for &(j2, c2, y) in &self.rows[b] {
                        if j == j2 && c == c2 {
                            s += x * y.conj() / wn[j];
                        }
                    }
                }
                if b + 1 == a {
                    t.lower[a] = s;
                } else if b == a {
                    t.diag[a] = s;
                } else {
                    t.upper[a] = s;
                }
            }
        }
        t
    }
}

/// Linear interpolation of face values onto the node rings, plus a linear
/// extrapolation to `r = 1`.
pub(crate) fn faces_to_nodes(face: &[C]) -> Vec<C> {
    let n = face.len() - 1;
    let mut out = vec![ZERO; n + 1];
    for j in 0..n - 1 {
        out[j] = 0.5 * (face[j] + face[j + 1]);
    }
    out[n - 1] = face[n - 1] / 3.0 + face[n] * (2.0 / 3.0);
    out[n] = face[n] + (face[n] - face[n - 1]) / 3.0;
    out
}

/// Inverse of [`faces_to_nodes`] on interior nodes. For non-axisymmetric
/// slots the pole face is zero; for m = 0 the free pole value is chosen so
/// that the face values have zero weighted sum.
pub(crate) fn nodes_to_faces(node: &[C], axis: bool, wf: &[f64]) -> Vec<C> {
    let n = wf.len() - 1;
    let chain = |g0: C, src: &[C]| {
        let mut g = vec![ZERO; n + 1];
        g[0] = g0;
        for j in 0..n - 1 {
            g[j + 1] = src[j] * 2.0 - g[j];
        }
        g[n] = (src[n - 1] * 3.0 - g[n - 1]) / 2.0;
        g
    };
    if !axis {
        return chain(ZERO, node);
    }
    let base = chain(ZERO, node);
    let zeros = vec![ZERO; n];
    let unit = chain(C::new(1.0, 0.0), &zeros);
    let sb: C = base.iter().zip(wf).map(|(g, w)| g * w).sum();
    let su: C = unit.iter().zip(wf).map(|(g, w)| g * w).sum();
    let a = -sb / su;
    base.iter().zip(&unit).map(|(b, u)| b + u * a).collect()
}

/// Polar components `(u_r, u_theta)` of the horizontal part, pointwise.
pub fn to_polar(grid: &DiskGrid, w1: &[f64], w2: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut ur = vec![0.0; grid.len()];
    let mut ut = vec![0.0; grid.len()];
    for j in 0..grid.n_rings() {
        for k in 0..grid.n_theta {
            let i = grid.idx(j, k);
            let (c, s) = (grid.cos_theta(k), grid.sin_theta(k));
            ur[i] = c * w1[i] + s * w2[i];
            ut[i] = -s * w1[i] + c * w2[i];
        }
    }
    (ur, ut)
}

pub fn from_polar(grid: &DiskGrid, ur: &[f64], ut: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut w1 = vec![0.0; grid.len()];
    let mut w2 = vec![0.0; grid.len()];
    for j in 0..grid.n_rings() {
        for k in 0..grid.n_theta {
            let i = grid.idx(j, k);
            let (c, s) = (grid.cos_theta(k), grid.sin_theta(k));
            w1[i] = c * ur[i] - s * ut[i];
            w2[i] = s * ur[i] + c * ut[i];
        }
    }
    (w1, w2)
}

/// Polar-mode arrays `[u_r, u_theta, w3]`, ring-major.
pub(crate) fn polar_modes(w: &VectorField3, with_w3: bool) -> [Vec<C>; 3] {
    let grid = w.grid();
    let (ur, ut) = to_polar(grid, &w.w1.phys(), &w.w2.phys());
    let w3 = if with_w3 {
        w.w3.spec().into_owned()
    } else {
        vec![ZERO; grid.len()]
    };
    [forward_real(grid, &ur), forward_real(grid, &ut), w3]
}

/// The constraint operator for one grid and coupling `s = 2 pi / sigma`, with
/// the per-mode factorizations needed to project onto its kernel.
#[derive(Debug)]
pub struct ConstraintOp {
    grid: Arc<DiskGrid>,
    geo: FaceGeometry,
    modes: Vec<ModeRows>,
    lu: Vec<TridiagLu>,
}

impl ConstraintOp {
    pub fn new(grid: &Arc<DiskGrid>, s: f64) -> Self {
        let geo = FaceGeometry::new(grid);
        let modes: Vec<ModeRows> = (0..grid.n_theta)
            .map(|k| mode_rows(grid, &geo, k, s))
            .collect();
        let lu = modes
            .iter()
            .map(|m| {
                let mut g = m.gram(&geo.wn);
                if m.first == 0 {
                    // q is defined up to a constant for m = 0: fix the pole face.
                    g.pin_row(0);
                    g.lower[1] = ZERO;
                }
                g.factor()
            })
            .collect();
        Self {
            grid: Arc::clone(grid),
            geo,
            modes,
            lu,
        }
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        &self.grid
    }

    pub fn geometry(&self) -> &FaceGeometry {
        &self.geo
    }

    /// Face values of `A w` for every slot, `[slot][face]`.
    pub(crate) fn face_values(&self, pm: &[Vec<C>; 3]) -> Vec<Vec<C>> {
        let g = &self.grid;
        (0..g.n_theta)
            .map(|k| {
                let cols = [
                    crate::radial::column(g, &pm[0], k),
                    crate::radial::column(g, &pm[1], k),
                    crate::radial::column(g, &pm[2], k),
                ];
                self.modes[k].apply([&cols[0], &cols[1], &cols[2]])
            })
            .collect()
    }

    /// Node values of `A w`.
    pub fn residual(&self, w: &VectorField3, with_w3: bool) -> ScalarField {
        let g = &self.grid;
        let pm = polar_modes(w, with_w3);
        let faces = self.face_values(&pm);
        let mut out = vec![ZERO; g.len()];
        for (k, fv) in faces.iter().enumerate() {
            crate::radial::set_column(g, &mut out, k, &faces_to_nodes(fv));
        }
        ScalarField::from_values(g, inverse_real(g, &out))
    }

    /// Largest face value of `A w` scaled by the face geometry (area-weighted
    /// L2 over faces).
    pub fn face_norm(&self, w: &VectorField3) -> f64 {
        let pm = polar_modes(w, true);
        let faces = self.face_values(&pm);
        let n = self.grid.n_theta as f64;
        let mut s = 0.0;
        for fv in &faces {
            for (v, a) in fv.iter().zip(&self.geo.wf) {
                s += v.norm_sqr() * a;
            }
        }
        (s * 2.0 * std::f64::consts::PI * n).sqrt() / n
    }

    /// Correction `A* p` (node polar columns) solving `A A* q = -A w` per slot.
    /// Works on polar-mode arrays whose boundary values are ignored (taken
    /// as zero). Returns the corrections and the face pressure per slot.
    pub(crate) fn solve_correction(
        &self,
        rhs_faces: &[Vec<C>],
    ) -> ([Vec<C>; 3], Vec<Vec<C>>) {
        let g = &self.grid;
        let mut corr = [
            vec![ZERO; g.len()],
            vec![ZERO; g.len()],
            vec![ZERO; g.len()],
        ];
        let mut qf = Vec::with_capacity(g.n_theta);
        for k in 0..g.n_theta {
            let m = &self.modes[k];
            let mut b: Vec<C> = rhs_faces[k][m.first..].iter().map(|v| -v).collect();
            if m.first == 0 {
                b[0] = ZERO;
            }
            self.lu[k].solve(&mut b);
            let mut p = vec![ZERO; g.n_r + 1];
            p[m.first..].copy_from_slice(&b);
            let d = m.adjoint(&p, &self.geo.wn);
            for c in 0..3 {
                for j in 0..g.n_r {
                    corr[c][g.idx(j, k)] = d[c][j];
                }
            }
            let q: Vec<C> = p.iter().zip(&self.geo.wf).map(|(v, w)| v / w).collect();
            qf.push(q);
        }
        (corr, qf)
    }

    /// Orthogonal projection onto `ker A` among fields with zero boundary
    /// value. Returns the projected field and the pressure-like potential `q`
    /// (node values, zero mean) with `w = w_star + A* q`.
    pub fn project(&self, w_star: &VectorField3) -> (VectorField3, ScalarField) {
        let g = &self.grid;
        let w0 = w_star.clone().with_zero_trace();
        let pm = polar_modes(&w0, true);
        let faces = self.face_values(&pm);
        let (corr, qf) = self.solve_correction(&faces);
        let dr = inverse_real(g, &corr[0]);
        let dt = inverse_real(g, &corr[1]);
        let d3 = inverse_real(g, &corr[2]);
        let (d1, d2) = from_polar(g, &dr, &dt);
        let add = |f: &ScalarField, d: &[f64]| {
            let mut v = f.phys().into_owned();
            for i in 0..g.interior_len() {
                v[i] += d[i];
            }
            ScalarField::from_values(g, v)
        };
        let w = VectorField3 {
            w1: add(&w0.w1, &d1),
            w2: add(&w0.w2, &d2),
            w3: add(&w0.w3, &d3),
        };
        let mut qn = vec![ZERO; g.len()];
        for (k, q) in qf.iter().enumerate() {
            crate::radial::set_column(g, &mut qn, k, &faces_to_nodes(q));
        }
        let q = ScalarField::from_values(g, inverse_real(g, &qn));
        let mean = q.mean();
        (w, q.map(|x| x - mean))
    }

    /// First active face of slot `k` and the sparse rows
    /// `(node, component, coefficient)` of the active faces. The trace
    /// coefficients apply to the boundary values in the last face.
    pub(crate) fn rows(&self, k: usize) -> (usize, &[Vec<(usize, usize, C)>], [C; 3]) {
        let m = &self.modes[k];
        (m.first, &m.rows, m.trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn faces_nodes_round_trip() {
        let g = build_grid(16, 8).unwrap();
        let geo = FaceGeometry::new(&g);
        let node: Vec<C> = (0..g.n_r).map(|j| C::new((j as f64).sin(), 0.1 * j as f64)).collect();
        for axis in [false, true] {
            let f = nodes_to_faces(&node, axis, &geo.wf);
            let back = faces_to_nodes(&f);
            for j in 0..g.n_r {
                assert!((back[j] - node[j]).norm() < 1e-12);
            }
            if !axis {
                assert_eq!(f[0], ZERO);
            } else {
                let s: C = f.iter().zip(&geo.wf).map(|(a, w)| a * w).sum();
                assert!(s.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn face_areas_tile_the_disk() {
        let g = build_grid(16, 8).unwrap();
        let geo = FaceGeometry::new(&g);
        let s: f64 = geo.wf.iter().sum();
        assert!((s - 0.5).abs() < 1e-14);
    }
}
