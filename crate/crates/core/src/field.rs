//! Scalar and vector fields on a [`DiskGrid`], quadrature norms and the
//! azimuthal transform.

use std::borrow::Cow;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{HelixError, Result};
use crate::grid::DiskGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Debug)]
pub enum Repr {
    /// Real samples, ring-major, boundary ring last.
    Physical(Vec<f64>),
    /// Azimuthal coefficients per ring, FFT slot order.
    Modes(Vec<Complex64>),
}

impl Repr {
    fn name(&self) -> &'static str {
        match self {
            Repr::Physical(_) => "physical",
            Repr::Modes(_) => "modes",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<DiskGrid>,
    repr: Repr,
}

pub(crate) fn forward_real(grid: &DiskGrid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.forward_rings(&mut buf);
    buf
}

pub(crate) fn inverse_real(grid: &DiskGrid, modes: &[Complex64]) -> Vec<f64> {
    let mut buf = modes.to_vec();
    grid.inverse_rings(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

impl ScalarField {
    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        Self::from_values(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: &Arc<DiskGrid>, c: f64) -> Self {
        Self::from_values(grid, vec![c; grid.len()])
    }

    /// Samples `f(y1, y2)` on every ring, the boundary ring included.
    pub fn from_fn(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.len());
        for j in 0..grid.n_rings() {
            for k in 0..grid.n_theta {
                let (y1, y2) = grid.point(j, k);
                v.push(f(y1, y2));
            }
        }
        Self::from_values(grid, v)
    }

    /// Samples `f(r, theta)`.
    pub fn from_polar(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.len());
        for j in 0..grid.n_rings() {
            for k in 0..grid.n_theta {
                v.push(f(grid.r[j], grid.theta[k]));
            }
        }
        Self::from_values(grid, v)
    }

    pub fn from_values(grid: &Arc<DiskGrid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count does not match grid");
        Self {
            grid: Arc::clone(grid),
            repr: Repr::Physical(values),
        }
    }

    pub fn from_modes(grid: &Arc<DiskGrid>, modes: Vec<Complex64>) -> Self {
        assert_eq!(modes.len(), grid.len(), "mode count does not match grid");
        Self {
            grid: Arc::clone(grid),
            repr: Repr::Modes(modes),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<DiskGrid> {
        &self.grid
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_physical(&self) -> bool {
        matches!(self.repr, Repr::Physical(_))
    }

    pub fn values(&self) -> Result<&[f64]> {
        match &self.repr {
            Repr::Physical(v) => Ok(v),
            r => Err(HelixError::Representation {
                expected: "physical",
                found: r.name(),
            }),
        }
    }

    pub fn values_mut(&mut self) -> Result<&mut [f64]> {
        match &mut self.repr {
            Repr::Physical(v) => Ok(v),
            r => Err(HelixError::Representation {
                expected: "physical",
                found: r.name(),
            }),
        }
    }

    pub fn modes(&self) -> Result<&[Complex64]> {
        match &self.repr {
            Repr::Modes(m) => Ok(m),
            r => Err(HelixError::Representation {
                expected: "modes",
                found: r.name(),
            }),
        }
    }

    /// Physical samples, transforming if needed.
    pub fn phys(&self) -> Cow<'_, [f64]> {
        match &self.repr {
            Repr::Physical(v) => Cow::Borrowed(v),
            Repr::Modes(m) => Cow::Owned(inverse_real(&self.grid, m)),
        }
    }

    /// Mode coefficients, transforming if needed.
    pub fn spec(&self) -> Cow<'_, [Complex64]> {
        match &self.repr {
            Repr::Modes(m) => Cow::Borrowed(m),
            Repr::Physical(v) => Cow::Owned(forward_real(&self.grid, v)),
        }
    }

    pub fn to_physical(&self) -> ScalarField {
        Self::from_values(&self.grid, self.phys().into_owned())
    }

    pub fn to_modes(&self) -> ScalarField {
        Self::from_modes(&self.grid, self.spec().into_owned())
    }

    pub fn into_values(self) -> Vec<f64> {
        match self.repr {
            Repr::Physical(v) => v,
            Repr::Modes(m) => inverse_real(&self.grid, &m),
        }
    }

    /// Value at node `(j, k)`; `j == n_r` addresses the boundary ring.
    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.phys()[self.grid.idx(j, k)]
    }

    /// Boundary ring samples.
    pub fn trace(&self) -> Vec<f64> {
        let start = self.grid.interior_len();
        self.phys()[start..].to_vec()
    }

    pub fn with_zero_trace(self) -> ScalarField {
        let grid = Arc::clone(&self.grid);
        let mut v = self.into_values();
        v[grid.interior_len()..].iter_mut().for_each(|x| *x = 0.0);
        ScalarField::from_values(&grid, v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        Self::from_values(&self.grid, self.phys().iter().map(|&x| f(x)).collect())
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.grid.check_same(&other.grid)?;
        let a = self.phys();
        let b = other.phys();
        Ok(Self::from_values(
            &self.grid,
            a.iter().zip(b.iter()).map(|(&x, &y)| f(x, y)).collect(),
        ))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        self.map(|x| s * x)
    }

    /// Max |f| over interior nodes.
    pub fn max_abs(&self) -> f64 {
        self.phys()[..self.grid.interior_len()]
            .iter()
            .fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// Max |f| over all rings including the boundary.
    pub fn max_abs_all(&self) -> f64 {
        self.phys().iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// Quadrature integral over the disk.
    pub fn integral(&self) -> f64 {
        let g = &self.grid;
        let v = self.phys();
        let mut s = 0.0;
        for j in 0..g.n_r {
            let row: f64 = v[g.idx(j, 0)..g.idx(j, 0) + g.n_theta].iter().sum();
            s += g.weights[j] * row;
        }
        s
    }

    /// Quadrature mean, `integral / pi`.
    pub fn mean(&self) -> f64 {
        self.integral() / std::f64::consts::PI
    }

    /// Removes azimuthal modes with |m| above the 2/3 cutoff.
    pub fn dealiased(&self) -> ScalarField {
        let mut m = self.spec().into_owned();
        truncate_modes(&self.grid, &mut m);
        ScalarField::from_values(&self.grid, inverse_real(&self.grid, &m))
    }
}

pub(crate) fn truncate_modes(grid: &DiskGrid, m: &mut [Complex64]) {
    let cut = grid.dealias_cutoff();
    for j in 0..grid.n_rings() {
        for k in 0..grid.n_theta {
            if grid.wavenumber(k).abs() > cut || k == grid.n_theta / 2 {
                m[grid.idx(j, k)] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Transforms between physical samples and azimuthal modes. The forward
/// direction divides by `n_theta`, so `cos(theta)` has coefficient 1/2 at
/// `m = +1` and `m = -1`.
pub fn azimuthal_transform(f: &ScalarField, direction: Direction) -> Result<ScalarField> {
    match (direction, &f.repr) {
        (Direction::Forward, Repr::Physical(v)) => {
            Ok(ScalarField::from_modes(&f.grid, forward_real(&f.grid, v)))
        }
        (Direction::Inverse, Repr::Modes(m)) => {
            Ok(ScalarField::from_values(&f.grid, inverse_real(&f.grid, m)))
        }
        (Direction::Forward, r) => Err(HelixError::Representation {
            expected: "physical",
            found: r.name(),
        }),
        (Direction::Inverse, r) => Err(HelixError::Representation {
            expected: "modes",
            found: r.name(),
        }),
    }
}

/// Quadrature approximation of the L2(D) inner product.
pub fn l2_inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    let grid = &f.grid;
    let a = f.phys();
    let b = g.phys();
    let mut s = 0.0;
    for j in 0..grid.n_r {
        let base = grid.idx(j, 0);
        let row: f64 = (0..grid.n_theta).map(|k| a[base + k] * b[base + k]).sum();
        s += grid.weights[j] * row;
    }
    Ok(s)
}

pub fn l2_norm(f: &ScalarField) -> f64 {
    l2_inner(f, f).expect("same grid").max(0.0).sqrt()
}

/// Quadrature Lp norm; `p = f64::INFINITY` gives the max over interior nodes.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(HelixError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let grid = &f.grid;
    let v = f.phys();
    let mut s = 0.0;
    for j in 0..grid.n_r {
        let base = grid.idx(j, 0);
        let row: f64 = (0..grid.n_theta).map(|k| v[base + k].abs().powf(p)).sum();
        s += grid.weights[j] * row;
    }
    Ok(s.powf(1.0 / p))
}

/// Three Cartesian components sampled on a common grid.
#[derive(Clone, Debug)]
pub struct VectorField3 {
    pub w1: ScalarField,
    pub w2: ScalarField,
    pub w3: ScalarField,
}

impl VectorField3 {
    pub fn new(w1: ScalarField, w2: ScalarField, w3: ScalarField) -> Result<Self> {
        w1.grid.check_same(&w2.grid)?;
        w1.grid.check_same(&w3.grid)?;
        Ok(Self { w1, w2, w3 })
    }

    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        Self {
            w1: ScalarField::zeros(grid),
            w2: ScalarField::zeros(grid),
            w3: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> [f64; 3]) -> Self {
        let mut c = [
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        ];
        for j in 0..grid.n_rings() {
            for k in 0..grid.n_theta {
                let (y1, y2) = grid.point(j, k);
                let v = f(y1, y2);
                for i in 0..3 {
                    c[i].push(v[i]);
                }
            }
        }
        let [a, b, d] = c;
        Self {
            w1: ScalarField::from_values(grid, a),
            w2: ScalarField::from_values(grid, b),
            w3: ScalarField::from_values(grid, d),
        }
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        self.w1.grid()
    }

    pub fn components(&self) -> [&ScalarField; 3] {
        [&self.w1, &self.w2, &self.w3]
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> VectorField3 {
        VectorField3 {
            w1: f(&self.w1),
            w2: f(&self.w2),
            w3: f(&self.w3),
        }
    }

    pub fn zip_components(
        &self,
        other: &VectorField3,
        f: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<VectorField3> {
        Ok(VectorField3 {
            w1: f(&self.w1, &other.w1)?,
            w2: f(&self.w2, &other.w2)?,
            w3: f(&self.w3, &other.w3)?,
        })
    }

    pub fn add(&self, other: &VectorField3) -> Result<VectorField3> {
        self.zip_components(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &VectorField3) -> Result<VectorField3> {
        self.zip_components(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: f64) -> VectorField3 {
        self.map_components(|c| c.scale(s))
    }

    pub fn to_physical(&self) -> VectorField3 {
        self.map_components(|c| c.to_physical())
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| l2_inner(c, c).expect("same grid"))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().max(0.0).sqrt()
    }

    pub fn l2_inner(&self, other: &VectorField3) -> Result<f64> {
        Ok(l2_inner(&self.w1, &other.w1)?
            + l2_inner(&self.w2, &other.w2)?
            + l2_inner(&self.w3, &other.w3)?)
    }

    /// Max pointwise Euclidean length over interior nodes.
    pub fn max_norm(&self) -> f64 {
        let g = self.grid();
        let (a, b, c) = (self.w1.phys(), self.w2.phys(), self.w3.phys());
        (0..g.interior_len())
            .map(|i| (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt())
            .fold(0.0, f64::max)
    }

    /// Max pointwise horizontal length over interior nodes.
    pub fn max_horizontal(&self) -> f64 {
        let g = self.grid();
        let (a, b) = (self.w1.phys(), self.w2.phys());
        (0..g.interior_len())
            .map(|i| a[i].hypot(b[i]))
            .fold(0.0, f64::max)
    }

    pub fn with_zero_trace(self) -> VectorField3 {
        VectorField3 {
            w1: self.w1.with_zero_trace(),
            w2: self.w2.with_zero_trace(),
            w3: self.w3.with_zero_trace(),
        }
    }

    pub fn dealiased(&self) -> VectorField3 {
        self.map_components(|c| c.dealiased())
    }

    /// `w_H^perp = (-w2, w1, 0)`.
    pub fn horizontal_perp(&self) -> VectorField3 {
        VectorField3 {
            w1: self.w2.scale(-1.0),
            w2: self.w1.to_physical(),
            w3: ScalarField::zeros(self.grid()),
        }
    }

    pub fn horizontal(&self) -> VectorField3 {
        VectorField3 {
            w1: self.w1.clone(),
            w2: self.w2.clone(),
            w3: ScalarField::zeros(self.grid()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn unit_field_integrates_to_area() {
        let g = build_grid(32, 32).unwrap();
        let one = ScalarField::constant(&g, 1.0);
        assert!((l2_inner(&one, &one).unwrap() - PI).abs() < 1e-10 * PI);
        let y1 = ScalarField::from_fn(&g, |a, _| a);
        assert!(l2_inner(&one, &y1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn r_squared_moment_converges() {
        // int r^4 dA = pi/3
        let mut errs = vec![];
        for n in [16, 32, 64] {
            let g = build_grid(n, 16).unwrap();
            let f = ScalarField::from_polar(&g, |r, _| r * r);
            errs.push((l2_inner(&f, &f).unwrap() - PI / 3.0).abs());
        }
        assert!(errs[2] < 1e-3);
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 1.9, "order {order}");
    }

    #[test]
    fn lp_norm_examples() {
        let g = build_grid(64, 32).unwrap();
        let one = ScalarField::constant(&g, 1.0);
        assert!((lp_norm(&one, 2.0).unwrap() - PI.sqrt()).abs() < 1e-10);
        assert_eq!(lp_norm(&one, f64::INFINITY).unwrap(), 1.0);
        let r2 = ScalarField::from_polar(&g, |r, _| r * r);
        let l4 = lp_norm(&r2, 4.0).unwrap();
        assert!((l4 - (PI / 5.0).powf(0.25)).abs() < 1e-3);
        assert!(lp_norm(&one, 0.5).is_err());
    }

    #[test]
    fn cosine_lands_on_unit_modes() {
        let g = build_grid(8, 16).unwrap();
        let f = ScalarField::from_polar(&g, |_, t| t.cos());
        let m = azimuthal_transform(&f, Direction::Forward).unwrap();
        let c = m.modes().unwrap();
        for j in 0..g.n_rings() {
            for k in 0..g.n_theta {
                let v = c[g.idx(j, k)];
                let want = if k == 1 || k == g.n_theta - 1 { 0.5 } else { 0.0 };
                assert!((v.re - want).abs() < 1e-14 && v.im.abs() < 1e-14);
            }
        }
        let one = ScalarField::constant(&g, 1.0);
        let m1 = azimuthal_transform(&one, Direction::Forward).unwrap();
        let c1 = m1.modes().unwrap();
        assert!((c1[0].re - 1.0).abs() < 1e-14);
        assert!(c1[1..g.n_theta].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn transform_round_trip_and_symmetry() {
        let g = build_grid(16, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = ScalarField::from_values(&g, v.clone());
        let m = azimuthal_transform(&f, Direction::Forward).unwrap();
        let c = m.modes().unwrap();
        for j in 0..g.n_rings() {
            for k in 1..g.n_theta {
                let a = c[g.idx(j, k)];
                let b = c[g.idx(j, g.n_theta - k)];
                assert!((a - b.conj()).norm() < 1e-14);
            }
        }
        let back = azimuthal_transform(&m, Direction::Inverse).unwrap();
        let scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        for (a, b) in back.values().unwrap().iter().zip(&v) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
        assert!(azimuthal_transform(&m, Direction::Forward).is_err());
        assert!(azimuthal_transform(&f, Direction::Inverse).is_err());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = ScalarField::zeros(&build_grid(8, 8).unwrap());
        let b = ScalarField::zeros(&build_grid(8, 16).unwrap());
        assert!(l2_inner(&a, &b).is_err());
    }

    #[test]
    fn quadrature_order_for_even_powers() {
        for k in 1..=2 {
            let exact = 2.0 * PI / (2.0 * k as f64 + 2.0);
            let err = |n: usize| {
                let g = build_grid(n, 16).unwrap();
                let f = ScalarField::from_polar(&g, |r, _| r.powi(2 * k));
                (f.integral() - exact).abs()
            };
            let order = (err(32) / err(64)).log2();
            assert!(order >= 1.9, "k = {k}: order {order}");
        }
    }
}
