//! Named initial-data presets.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bessel::{bessel_j, bessel_zero};
use crate::error::HelixError;
use crate::field::{ScalarField, VectorField3};
use crate::grid::DiskGrid;

/// Velocity presets for the viscous solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityFamily {
    /// `w_H = r (1 - r^2) e_theta`, `w3 = 1 - r^2`: every sigma term vanishes.
    RadialSwirl,
    /// `w_H = grad_perp (1 - r^2)^2`, `w3 = (1 - r^2) y1`.
    DefaultGeneric,
    /// `w_H = J1(j11 r) e_theta`, `w3 = 0`.
    BesselSwirl,
    /// `w_H = J1(j11 r) e_theta`, `w3 = J0(j01 r)`.
    BesselSwirlVertical,
}

impl VelocityFamily {
    pub const ALL: [VelocityFamily; 4] = [
        VelocityFamily::RadialSwirl,
        VelocityFamily::DefaultGeneric,
        VelocityFamily::BesselSwirl,
        VelocityFamily::BesselSwirlVertical,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VelocityFamily::RadialSwirl => "radial-swirl",
            VelocityFamily::DefaultGeneric => "default-generic",
            VelocityFamily::BesselSwirl => "bessel-swirl",
            VelocityFamily::BesselSwirlVertical => "bessel-swirl-vertical",
        }
    }

    /// Samples the preset scaled by `amplitude`.
    pub fn sample(&self, grid: &Arc<DiskGrid>, amplitude: f64) -> VectorField3 {
        let a = amplitude;
        match self {
            VelocityFamily::RadialSwirl => VectorField3::from_fn(grid, |y1, y2| {
                let s = 1.0 - y1 * y1 - y2 * y2;
                [-a * y2 * s, a * y1 * s, a * s]
            }),
            VelocityFamily::DefaultGeneric => VectorField3::from_fn(grid, |y1, y2| {
                let s = 1.0 - y1 * y1 - y2 * y2;
                [4.0 * a * s * y2, -4.0 * a * s * y1, a * s * y1]
            }),
            VelocityFamily::BesselSwirl | VelocityFamily::BesselSwirlVertical => {
                let k1 = bessel_zero(1, 1);
                let k0 = bessel_zero(0, 1);
                let vertical = *self == VelocityFamily::BesselSwirlVertical;
                VectorField3::from_fn(grid, |y1, y2| {
                    let r = (y1 * y1 + y2 * y2).sqrt();
                    let v = if r >= 1.0 { 0.0 } else { a * bessel_j(1, k1 * r) };
                    let (c, s) = if r > 0.0 { (y1 / r, y2 / r) } else { (1.0, 0.0) };
                    let w3 = if vertical && r < 1.0 {
                        a * bessel_j(0, k0 * r)
                    } else {
                        0.0
                    };
                    [-v * s, v * c, w3]
                })
            }
        }
    }
}

impl fmt::Display for VelocityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VelocityFamily {
    type Err = HelixError;

    fn from_str(s: &str) -> Result<Self, HelixError> {
        VelocityFamily::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| HelixError::Config(format!("unknown velocity family '{s}'")))
    }
}

/// Vorticity presets for the inviscid solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VorticityFamily {
    /// `exp(-|y - c|^2 / width)`.
    GaussianBlob { cx: f64, cy: f64, width: f64 },
    /// `(1 - r^2)^2`, stationary under the flow it induces.
    RadialVortex,
}

impl VorticityFamily {
    pub const DEFAULT_BLOB: VorticityFamily = VorticityFamily::GaussianBlob {
        cx: 0.3,
        cy: 0.0,
        width: 0.05,
    };

    pub fn name(&self) -> &'static str {
        match self {
            VorticityFamily::GaussianBlob { .. } => "gaussian-blob",
            VorticityFamily::RadialVortex => "radial-vortex",
        }
    }

    pub fn sample(&self, grid: &Arc<DiskGrid>, amplitude: f64) -> ScalarField {
        match *self {
            VorticityFamily::GaussianBlob { cx, cy, width } => ScalarField::from_fn(grid, |a, b| {
                amplitude * (-((a - cx).powi(2) + (b - cy).powi(2)) / width).exp()
            }),
            VorticityFamily::RadialVortex => {
                ScalarField::from_polar(grid, |r, _| amplitude * (1.0 - r * r).powi(2))
            }
        }
    }
}

impl FromStr for VorticityFamily {
    type Err = HelixError;

    fn from_str(s: &str) -> Result<Self, HelixError> {
        match s {
            "gaussian-blob" => Ok(VorticityFamily::DEFAULT_BLOB),
            "radial-vortex" => Ok(VorticityFamily::RadialVortex),
            _ => Err(HelixError::Config(format!("unknown vorticity family '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::operators::divergence_h;

    #[test]
    fn names_round_trip() {
        for f in VelocityFamily::ALL {
            assert_eq!(f.name().parse::<VelocityFamily>().unwrap(), f);
        }
        assert!("nope".parse::<VelocityFamily>().is_err());
        assert_eq!(
            "gaussian-blob".parse::<VorticityFamily>().unwrap(),
            VorticityFamily::DEFAULT_BLOB
        );
    }

    #[test]
    fn presets_vanish_on_boundary_and_are_solenoidal() {
        let g = build_grid(32, 64).unwrap();
        for f in VelocityFamily::ALL {
            let w = f.sample(&g, 1.0);
            for c in w.components() {
                assert!(c.trace().iter().all(|x| x.abs() < 1e-15), "{f}");
            }
            assert!(divergence_h(&w).max_abs() < 0.05, "{f}");
        }
    }
}
