//! Staggered polar grid on the unit disk.
//!
//! Radial nodes sit at `r_j = (j + 1/2) dr`, so the pole is never a node. Every
//! field additionally carries one boundary ring at `r = 1` holding its trace;
//! the quadrature only sees the interior rings.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{HelixError, Result};

pub const MIN_RADIAL: usize = 8;
pub const MIN_AZIMUTHAL: usize = 8;

pub struct DiskGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub dr: f64,
    /// Ring radii; `r[n_r] == 1.0` is the boundary ring.
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// Per-node quadrature weight for interior ring `j` (area units).
    pub weights: Vec<f64>,
    cos_t: Vec<f64>,
    sin_t: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for DiskGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiskGrid")
            .field("n_r", &self.n_r)
            .field("n_theta", &self.n_theta)
            .finish()
    }
}

/// Builds the grid. `n_r >= 8`, `n_theta >= 8` and even.
pub fn build_grid(n_r: usize, n_theta: usize) -> Result<Arc<DiskGrid>> {
    if n_r < MIN_RADIAL {
        return Err(HelixError::InvalidGrid(format!(
            "n_r = {n_r} is below the minimum {MIN_RADIAL}"
        )));
    }
    if n_theta < MIN_AZIMUTHAL {
        return Err(HelixError::InvalidGrid(format!(
            "n_theta = {n_theta} is below the minimum {MIN_AZIMUTHAL}"
        )));
    }
    if n_theta % 2 != 0 {
        return Err(HelixError::InvalidGrid(format!("n_theta = {n_theta} is odd")));
    }
    let dr = 1.0 / n_r as f64;
    let mut r: Vec<f64> = (0..n_r).map(|j| (j as f64 + 0.5) * dr).collect();
    r.push(1.0);
    let dtheta = 2.0 * PI / n_theta as f64;
    let theta: Vec<f64> = (0..n_theta).map(|k| k as f64 * dtheta).collect();
    let weights = r[..n_r].iter().map(|&rj| rj * dr * dtheta).collect();
    let mut planner = FftPlanner::new();
    Ok(Arc::new(DiskGrid {
        n_r,
        n_theta,
        dr,
        cos_t: theta.iter().map(|t| t.cos()).collect(),
        sin_t: theta.iter().map(|t| t.sin()).collect(),
        r,
        theta,
        weights,
        fwd: planner.plan_fft_forward(n_theta),
        inv: planner.plan_fft_inverse(n_theta),
    }))
}

impl DiskGrid {
    /// Interior rings plus the boundary ring.
    #[inline]
    pub fn n_rings(&self) -> usize {
        self.n_r + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_rings() * self.n_theta
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn interior_len(&self) -> usize {
        self.n_r * self.n_theta
    }

    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j * self.n_theta + k
    }

    #[inline]
    pub fn cos_theta(&self, k: usize) -> f64 {
        self.cos_t[k]
    }

    #[inline]
    pub fn sin_theta(&self, k: usize) -> f64 {
        self.sin_t[k]
    }

    /// Cartesian coordinates of node `(j, k)`; `j == n_r` is on the circle.
    #[inline]
    pub fn point(&self, j: usize, k: usize) -> (f64, f64) {
        (self.r[j] * self.cos_t[k], self.r[j] * self.sin_t[k])
    }

    /// Signed azimuthal wavenumber stored at FFT slot `k`.
    #[inline]
    pub fn wavenumber(&self, k: usize) -> i64 {
        let n = self.n_theta as i64;
        let k = k as i64;
        if k <= n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Wavenumber used by first derivatives in theta; the Nyquist slot maps to 0
    /// so that real fields stay real.
    #[inline]
    pub fn deriv_wavenumber(&self, k: usize) -> f64 {
        if k == self.n_theta / 2 {
            0.0
        } else {
            self.wavenumber(k) as f64
        }
    }

    /// Parity of mode `k` under reflection through the pole.
    #[inline]
    pub fn pole_parity(&self, k: usize) -> f64 {
        if k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    pub fn is_axisymmetric(&self, k: usize) -> bool {
        k == 0
    }

    /// Largest |m| kept by the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n_theta / 3) as i64
    }

    pub fn same_shape(&self, other: &DiskGrid) -> bool {
        self.n_r == other.n_r && self.n_theta == other.n_theta
    }

    pub fn check_same(&self, other: &DiskGrid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(HelixError::GridMismatch(
                self.n_r,
                self.n_theta,
                other.n_r,
                other.n_theta,
            ))
        }
    }

    /// Forward transform of every ring in place; divides by `n_theta`.
    pub fn forward_rings(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len() % self.n_theta, 0);
        self.fwd.process(data);
        let s = 1.0 / self.n_theta as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }

    /// Inverse transform of every ring in place (no scaling).
    pub fn inverse_rings(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len() % self.n_theta, 0);
        self.inv.process(data);
    }

    /// Disk area element per unit angle of the interior node `j`.
    #[inline]
    pub fn ring_weight(&self, j: usize) -> f64 {
        self.r[j] * self.dr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staggered_first_radius() {
        let g = build_grid(8, 16).unwrap();
        assert!((g.r[0] - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(g.r[g.n_r], 1.0);
        let area: f64 = g.weights.iter().sum::<f64>() * g.n_theta as f64;
        assert!((area - PI).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_disk_area() {
        let g = build_grid(64, 128).unwrap();
        let area: f64 = g.weights.iter().sum::<f64>() * g.n_theta as f64;
        assert!(((area - PI) / PI).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_grid(8, 15).is_err());
        assert!(build_grid(7, 16).is_err());
        assert!(build_grid(8, 6).is_err());
    }

    #[test]
    fn radii_increase_inside_disk() {
        let g = build_grid(16, 16).unwrap();
        for w in g.r[..g.n_r].windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(g.r[0] > 0.0 && g.r[g.n_r - 1] < 1.0);
    }

    #[test]
    fn wavenumber_layout() {
        let g = build_grid(8, 8).unwrap();
        let m: Vec<i64> = (0..8).map(|k| g.wavenumber(k)).collect();
        assert_eq!(m, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.deriv_wavenumber(4), 0.0);
    }
}
