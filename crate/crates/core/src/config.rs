//! Experiment configuration: a TOML file with sections, layered over
//! per-experiment defaults.
//!
//! ```toml
//! seed = 7
//! [grid]
//! n_r = 64
//! n_theta = 128
//! [time]
//! dt = 1e-3
//! t_end = 0.5
//! [sweep]
//! sigmas = [2, 4, 8, 16, 32, 64]
//! [initial]
//! family = "default-generic"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HelixError, Result};
use crate::grid::{MIN_AZIMUTHAL, MIN_RADIAL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    NsConverge,
    EulerConverge,
    EnergyAudit,
    OperatorCheck,
    LiftCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::NsConverge,
        Experiment::EulerConverge,
        Experiment::EnergyAudit,
        Experiment::OperatorCheck,
        Experiment::LiftCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::NsConverge => "ns-converge",
            Experiment::EulerConverge => "euler-converge",
            Experiment::EnergyAudit => "energy-audit",
            Experiment::OperatorCheck => "operator-check",
            Experiment::LiftCheck => "lift-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HelixError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HelixError::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_r: usize,
    pub n_theta: usize,
    /// Vertical levels of the lifted field.
    pub n_z: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    /// Also the comparison time of the sweeps.
    pub t_end: f64,
    pub nu: f64,
    pub cfl: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub sigmas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub family: String,
    pub amplitude: f64,
    /// Blob centre and width, used by `gaussian-blob`.
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    /// Field dump overriding `family`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub proj_tol: f64,
    /// Largest accepted relative energy defect.
    pub energy: f64,
    /// Largest accepted fitted slope of the viscous sweep.
    pub slope: f64,
    pub slope_slack: f64,
    /// Errors at or below this are treated as exact (degenerate sweep).
    pub floor: f64,
    /// Largest accepted relative drift of conserved vorticity norms.
    pub drift: f64,
    pub identity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub grid: GridSection,
    pub time: TimeSection,
    pub sweep: SweepSection,
    pub initial: InitialSection,
    pub tolerances: Tolerances,
}

const FULL_SWEEP: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

impl ExperimentConfig {
    pub fn defaults(exp: Experiment) -> Self {
        let mut c = ExperimentConfig {
            seed: 7,
            grid: GridSection {
                n_r: 64,
                n_theta: 128,
                n_z: crate::lift::DEFAULT_LEVELS,
            },
            time: TimeSection {
                dt: 1e-3,
                t_end: 0.5,
                nu: 1.0,
                cfl: 0.5,
            },
            sweep: SweepSection {
                sigmas: FULL_SWEEP.to_vec(),
            },
            initial: InitialSection {
                family: "default-generic".into(),
                amplitude: 1.0,
                cx: 0.3,
                cy: 0.0,
                width: 0.05,
                dump: None,
            },
            tolerances: Tolerances {
                proj_tol: 1e-8,
                energy: 1e-3,
                slope: -0.5,
                slope_slack: 0.0,
                floor: 1e-8,
                drift: 0.01,
                identity: 1e-12,
            },
        };
        match exp {
            Experiment::NsConverge => {}
            Experiment::EulerConverge => {
                c.time.t_end = 1.0;
                c.time.cfl = 1.5;
                c.initial.family = "gaussian-blob".into();
            }
            Experiment::EnergyAudit => {
                c.grid.n_theta = 64;
                c.time.t_end = 0.1;
                c.sweep.sigmas = vec![2.0];
                c.initial.family = "bessel-swirl".into();
            }
            Experiment::OperatorCheck => {
                c.grid.n_theta = 64;
            }
            Experiment::LiftCheck => {
                c.grid.n_r = 32;
                c.grid.n_theta = 32;
                c.sweep.sigmas = vec![1.0, 4.0, 16.0];
            }
        }
        c
    }

    /// Defaults for `exp` overlaid with the keys present in `text`.
    pub fn from_toml(exp: Experiment, text: &str) -> Result<Self> {
        let user: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| HelixError::Config(e.to_string()))?;
        let mut base = toml::Table::try_from(Self::defaults(exp))
            .map_err(|e| HelixError::Config(e.to_string()))?;
        merge(&mut base, user);
        let cfg: Self = toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| HelixError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(exp: Experiment, path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::from_toml(exp, &std::fs::read_to_string(p)?),
            None => Ok(Self::defaults(exp)),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is plain data")
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.n_r < MIN_RADIAL || g.n_theta < MIN_AZIMUTHAL || g.n_theta % 2 != 0 {
            return Err(HelixError::Config(format!(
                "grid {}x{} is too small or has odd n_theta",
                g.n_r, g.n_theta
            )));
        }
        if g.n_z == 0 {
            return Err(HelixError::Config("n_z must be >= 1".into()));
        }
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) || !(t.t_end >= 0.0 && t.t_end.is_finite()) {
            return Err(HelixError::Config(format!("bad time window dt = {}, t_end = {}", t.dt, t.t_end)));
        }
        if !(t.nu > 0.0) || !(t.cfl > 0.0) {
            return Err(HelixError::Config("nu and cfl must be positive".into()));
        }
        check_sigmas(&self.sweep.sigmas)
    }
}

/// Sigma lists must be non-empty, finite, at least 1 and strictly increasing.
pub fn check_sigmas(s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(HelixError::Config("sigma list is empty".into()));
    }
    if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
        return Err(HelixError::Config(format!("sigma {bad} is not finite and >= 1")));
    }
    if s.windows(2).any(|p| p[1] <= p[0]) {
        return Err(HelixError::Config("sigma list must be strictly increasing".into()));
    }
    Ok(())
}

/// Parses `"2,4,8"`.
pub fn parse_sigma_list(text: &str) -> Result<Vec<f64>> {
    let v = text
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| HelixError::Config(format!("bad sigma value '{s}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_sigmas(&v)?;
    Ok(v)
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for e in Experiment::ALL {
            ExperimentConfig::defaults(e).validate().unwrap();
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let c = ExperimentConfig::from_toml(
            Experiment::NsConverge,
            "seed = 3\n[grid]\nn_r = 32\n[sweep]\nsigmas = [2.0, 8.0]\n",
        )
        .unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.grid.n_r, 32);
        assert_eq!(c.grid.n_theta, 128);
        assert_eq!(c.sweep.sigmas, vec![2.0, 8.0]);
        assert_eq!(c.initial.family, "default-generic");
    }

    #[test]
    fn round_trip_through_text() {
        let c = ExperimentConfig::defaults(Experiment::EulerConverge);
        let back = ExperimentConfig::from_toml(Experiment::NsConverge, &c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_input() {
        let e = Experiment::NsConverge;
        assert!(ExperimentConfig::from_toml(e, "[sweep]\nsigmas = []\n").is_err());
        assert!(ExperimentConfig::from_toml(e, "[sweep]\nsigmas = [4.0, 2.0]\n").is_err());
        assert!(ExperimentConfig::from_toml(e, "[sweep]\nsigmas = [0.5]\n").is_err());
        assert!(ExperimentConfig::from_toml(e, "[grid]\nn_rr = 3\n").is_err());
        assert!(ExperimentConfig::from_toml(e, "[grid]\nn_theta = 33\n").is_err());
        assert!(ExperimentConfig::from_toml(e, "not toml [").is_err());
    }

    #[test]
    fn sigma_lists() {
        assert_eq!(parse_sigma_list("2, 4,8").unwrap(), vec![2.0, 4.0, 8.0]);
        assert!(parse_sigma_list("").is_err());
        assert!(parse_sigma_list("2,x").is_err());
        assert!(parse_sigma_list("4,4").is_err());
    }
}
