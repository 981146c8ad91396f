//! Audits: the energy balance, the Ladyzhenskaya inequality, difference norms
//! between helical and planar runs, and log-log rate fits.

use crate::error::{HelixError, Result};
use crate::field::{l2_inner, lp_norm, ScalarField, VectorField3};
use crate::ns::{EnergyLog, EnergyRow, EnergySample, NsState};
use crate::operators::{apply_e, grad_norm_sq, h1_seminorm};
use crate::sigma::SigmaParam;

/// Energy rates evaluated with the quadrature gradient, independent of the
/// stepper's operators.
pub fn energy_sample(w: &VectorField3, sp: SigmaParam, nu: f64, t: f64) -> EnergySample {
    let sq = |f: &ScalarField| l2_inner(f, f).expect("same grid");
    let grad = h1_seminorm(w);
    let s2 = sp.coupling_sq();
    let sigma_rate = if s2 == 0.0 {
        0.0
    } else {
        let a = apply_e(&w.w1).add(&w.w2).expect("same grid");
        let b = apply_e(&w.w2).sub(&w.w1).expect("same grid");
        s2 * (sq(&apply_e(&w.w3)) + sq(&a) + sq(&b))
    };
    EnergySample {
        t,
        kinetic: w.l2_norm_sq(),
        viscous_rate: nu * grad * grad,
        sigma_rate: nu * sigma_rate,
    }
}

/// Relative defect of the energy balance at each state of a trajectory, with
/// trapezoid time integrals. The states should be consecutive steps.
pub fn energy_identity_residual(trajectory: &[NsState], sp: SigmaParam) -> Vec<EnergyRow> {
    let mut log = EnergyLog::default();
    for s in trajectory {
        log.push(energy_sample(&s.w, sp, s.nu, s.t));
    }
    log.rows()
}

/// `(|f|_{L4}^4, 2 |f|_{L2}^2 |grad f|_{L2}^2)` for `f` vanishing on the circle.
pub fn ladyzhenskaya_check(f: &ScalarField) -> Result<(f64, f64)> {
    let trace = f.trace().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = f.max_abs().max(1.0);
    if trace > 1e-12 * scale {
        return Err(HelixError::Precondition(format!(
            "field must vanish on the boundary (max trace {trace:.3e})"
        )));
    }
    let l4 = lp_norm(f, 4.0)?;
    let l2 = lp_norm(f, 2.0)?;
    Ok((l4.powi(4), 2.0 * l2 * l2 * grad_norm_sq(f)))
}

/// `(|w_sigma - w_inf|_{L2}, |grad (w_sigma - w_inf)|_{L2})` on the slice.
pub fn theta_norms(w_sigma: &VectorField3, w_inf: &VectorField3) -> Result<(f64, f64)> {
    let d = w_sigma.sub(w_inf)?;
    Ok((d.l2_norm(), h1_seminorm(&d)))
}

/// Least-squares fit of `log e = slope log sigma + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Slopes between neighbouring entries.
    pub pairwise: Vec<f64>,
}

impl RateFit {
    /// Slope over the last `n` entries (all of them if fewer).
    pub fn tail_slope(sigmas: &[f64], errors: &[f64], n: usize) -> Result<f64> {
        let k = sigmas.len().saturating_sub(n);
        Ok(fit_rate(&sigmas[k..], &errors[k..])?.slope)
    }
}

pub fn fit_rate(sigmas: &[f64], errors: &[f64]) -> Result<RateFit> {
    if sigmas.len() != errors.len() {
        return Err(HelixError::Precondition(format!(
            "{} sigma values but {} errors",
            sigmas.len(),
            errors.len()
        )));
    }
    if sigmas.len() < 2 {
        return Err(HelixError::Precondition("a rate needs at least two points".into()));
    }
    if sigmas.iter().chain(errors).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(HelixError::Precondition(
            "rate fit needs positive finite values".into(),
        ));
    }
    let x: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(HelixError::Precondition("sigma values must differ".into()));
    }
    let slope = sxy / sxx;
    let pairwise = x
        .windows(2)
        .zip(y.windows(2))
        .map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0]))
        .collect();
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        pairwise,
    })
}

/// Errors along a sigma sweep together with their fit.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub sigma_values: Vec<f64>,
    pub error_l2: Vec<f64>,
    /// Time-integrated `|grad Theta|^2` for viscous sweeps, the `H1` seminorm
    /// of the stream-function difference for inviscid ones.
    pub error_h1: Vec<f64>,
    pub t_star: f64,
    /// `None` when fewer than two points or some error is zero.
    pub fit: Option<RateFit>,
}

impl ConvergenceReport {
    pub fn new(sigma_values: Vec<f64>, error_l2: Vec<f64>, error_h1: Vec<f64>, t_star: f64) -> Self {
        assert_eq!(sigma_values.len(), error_l2.len());
        assert_eq!(sigma_values.len(), error_h1.len());
        let fit = fit_rate(&sigma_values, &error_l2).ok();
        Self {
            sigma_values,
            error_l2,
            error_h1,
            t_star,
            fit,
        }
    }

    pub fn fitted_slope(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.slope)
    }

    pub fn h1_fit(&self) -> Option<RateFit> {
        fit_rate(&self.sigma_values, &self.error_h1).ok()
    }

    pub fn strictly_decreasing(&self) -> bool {
        let down = |v: &[f64]| v.windows(2).all(|p| p[1] < p[0]);
        down(&self.error_l2) && down(&self.error_h1)
    }
}
