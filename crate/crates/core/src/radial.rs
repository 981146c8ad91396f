//! Radial finite-difference stencils and per-mode tridiagonal solves.
//!
//! Flux form `(1/r)(r f')'` on the staggered nodes: the flux through `r = 0`
//! vanishes, so the pole needs no ghost. At `r = 1` the flux uses the boundary
//! ring value (Dirichlet, second order one-sided) or is set to zero (Neumann).

use num_complex::Complex64;

use crate::grid::DiskGrid;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterBc {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug)]
pub struct Tridiag {
    pub lower: Vec<C>,
    pub diag: Vec<C>,
    pub upper: Vec<C>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![ZERO; n],
            diag: vec![ZERO; n],
            upper: vec![ZERO; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `a * I + b * self`
    pub fn shifted(&self, a: f64, b: f64) -> Tridiag {
        Tridiag {
            lower: self.lower.iter().map(|&x| x * b).collect(),
            diag: self.diag.iter().map(|&x| x * b + a).collect(),
            upper: self.upper.iter().map(|&x| x * b).collect(),
        }
    }

    /// Replaces row `i` by the identity row, fixing the unknown to the rhs.
    pub fn pin_row(&mut self, i: usize) {
        self.lower[i] = ZERO;
        self.upper[i] = ZERO;
        self.diag[i] = C::new(1.0, 0.0);
    }

    pub fn factor(&self) -> TridiagLu {
        let n = self.len();
        let mut cp = vec![ZERO; n];
        let mut dinv = vec![ZERO; n];
        let mut denom = self.diag[0];
        dinv[0] = denom.inv();
        if n > 1 {
            cp[0] = self.upper[0] * dinv[0];
        }
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * cp[i - 1];
            dinv[i] = denom.inv();
            if i + 1 < n {
                cp[i] = self.upper[i] * dinv[i];
            }
        }
        TridiagLu {
            lower: self.lower.clone(),
            cp,
            dinv,
        }
    }
}

/// Thomas factorization without pivoting; intended for diagonally dominant
/// or Hermitian definite systems.
#[derive(Clone, Debug)]
pub struct TridiagLu {
    lower: Vec<C>,
    cp: Vec<C>,
    dinv: Vec<C>,
}

impl TridiagLu {
    pub fn solve(&self, rhs: &mut [C]) {
        let n = rhs.len();
        rhs[0] *= self.dinv[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.dinv[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] = rhs[i] - self.cp[i] * rhs[i + 1];
        }
    }
}

/// `(1/r)(r f')' + c_j f` on the interior nodes of one azimuthal mode.
#[derive(Clone, Debug)]
pub struct RadialOp {
    pub tri: Tridiag,
    /// Weight of the boundary value in the last row (Dirichlet only).
    pub trace_coef: f64,
}

impl RadialOp {
    pub fn apply(&self, f: &[C], trace: C) -> Vec<C> {
        let mut out = self.tri.apply(&f[..self.tri.len()]);
        let n = out.len();
        out[n - 1] += trace * self.trace_coef;
        out
    }
}

pub fn radial_operator(grid: &DiskGrid, bc: OuterBc, coef: impl Fn(usize) -> f64) -> RadialOp {
    let n = grid.n_r;
    let h = grid.dr;
    let r = &grid.r;
    let mut t = Tridiag::zeros(n);
    for j in 0..n {
        let rin = j as f64 * h;
        let rout = (j + 1) as f64 * h;
        let s = 1.0 / (r[j] * h * h);
        let mut d = 0.0;
        if j > 0 {
            t.lower[j] = C::new(rin * s, 0.0);
            d -= rin * s;
        }
        if j + 1 < n {
            t.upper[j] = C::new(rout * s, 0.0);
            d -= rout * s;
        }
        t.diag[j] = C::new(d + coef(j), 0.0);
    }
    let mut trace_coef = 0.0;
    if bc == OuterBc::Dirichlet {
        // outer flux at r = 1 from (1, r_{n-1}, r_{n-2}): (8b - 9f + f_) / 3h
        let s = 1.0 / (r[n - 1] * h * h);
        t.diag[n - 1] += C::new(-3.0 * s, 0.0);
        t.lower[n - 1] += C::new(s / 3.0, 0.0);
        trace_coef = 8.0 * s / 3.0;
    }
    RadialOp { tri: t, trace_coef }
}

/// Radial derivative on every ring of a physical field. The pole ghost is the
/// value diametrically opposite on ring 0; the last interior ring and the
/// boundary ring use one-sided second-order formulas involving the trace.
pub fn radial_derivative(grid: &DiskGrid, v: &[f64]) -> Vec<f64> {
    let n = grid.n_r;
    let nt = grid.n_theta;
    let h = grid.dr;
    let mut out = vec![0.0; grid.len()];
    for k in 0..nt {
        let opp = (k + nt / 2) % nt;
        let f = |j: usize| v[grid.idx(j, k)];
        out[grid.idx(0, k)] = (f(1) - v[grid.idx(0, opp)]) / (2.0 * h);
        for j in 1..n - 1 {
            out[grid.idx(j, k)] = (f(j + 1) - f(j - 1)) / (2.0 * h);
        }
        let b = f(n);
        out[grid.idx(n - 1, k)] = (4.0 * b / 3.0 - f(n - 1) - f(n - 2) / 3.0) / h;
        out[grid.idx(n, k)] = (8.0 * b - 9.0 * f(n - 1) + f(n - 2)) / (3.0 * h);
    }
    out
}

/// Quadratic extrapolation of the boundary value from the last three rings.
#[inline]
pub fn extrapolate_trace(f1: C, f2: C, f3: C) -> C {
    (f1 * 15.0 - f2 * 10.0 + f3 * 3.0) / 8.0
}

/// Gathers the radial column of slot `k` (all rings) from a ring-major array.
pub fn column(grid: &DiskGrid, data: &[C], k: usize) -> Vec<C> {
    (0..grid.n_rings()).map(|j| data[grid.idx(j, k)]).collect()
}

pub fn set_column(grid: &DiskGrid, data: &mut [C], k: usize, col: &[C]) {
    for (j, &c) in col.iter().enumerate() {
        data[grid.idx(j, k)] = c;
    }
}
