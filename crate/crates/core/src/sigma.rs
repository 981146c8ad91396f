use std::f64::consts::PI;
use std::fmt;

use crate::error::{HelixError, Result};

/// Helical step. `Planar` is the limit sigma = infinity, where every
/// sigma-dependent coefficient vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaParam {
    Finite(f64),
    Planar,
}

impl SigmaParam {
    pub fn finite(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 1.0 {
            return Err(HelixError::Precondition(format!(
                "sigma must be finite and >= 1, got {sigma}"
            )));
        }
        Ok(SigmaParam::Finite(sigma))
    }

    pub fn is_planar(&self) -> bool {
        matches!(self, SigmaParam::Planar)
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            SigmaParam::Finite(s) => Some(s),
            SigmaParam::Planar => None,
        }
    }

    /// `sigma / 2 pi`
    pub fn alpha(&self) -> Option<f64> {
        self.sigma().map(|s| s / (2.0 * PI))
    }

    /// `2 pi / sigma`, zero when planar.
    pub fn coupling(&self) -> f64 {
        match *self {
            SigmaParam::Finite(s) => 2.0 * PI / s,
            SigmaParam::Planar => 0.0,
        }
    }

    /// `4 pi^2 / sigma^2`, zero when planar.
    pub fn coupling_sq(&self) -> f64 {
        let c = self.coupling();
        c * c
    }
}

impl fmt::Display for SigmaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaParam::Finite(s) => write!(f, "{s}"),
            SigmaParam::Planar => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_coefficients_vanish() {
        assert_eq!(SigmaParam::Planar.coupling(), 0.0);
        assert_eq!(SigmaParam::Planar.coupling_sq(), 0.0);
        assert!(SigmaParam::Planar.alpha().is_none());
    }

    #[test]
    fn finite_values() {
        let s = SigmaParam::finite(2.0 * PI).unwrap();
        assert!((s.alpha().unwrap() - 1.0).abs() < 1e-15);
        assert!((s.coupling() - 1.0).abs() < 1e-15);
        assert!(SigmaParam::finite(0.5).is_err());
        assert!(SigmaParam::finite(f64::INFINITY).is_err());
    }
}
