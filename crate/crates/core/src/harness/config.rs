use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuits::{NoiseModel, ReadoutError};
use crate::error::{Error, Result};
use crate::interferometry::MIN_SIN_THETA;
use crate::tripartite::{REFERENCE_THETA1, REFERENCE_THETA2};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Closed-form probabilities everywhere.
    #[default]
    Exact,
    /// Noiseless shot sampling.
    Sampled,
    /// Shot sampling under the noise model.
    Noisy,
}

impl std::fmt::Display for RunMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunMode::Exact => "exact",
            RunMode::Sampled => "sampled",
            RunMode::Noisy => "noisy",
        })
    }
}

/// Default noise: two-qubit depolarizing 0.01, symmetric readout 0.012.
pub fn default_noise() -> NoiseModel {
    NoiseModel {
        p1: 0.0,
        p2: 0.01,
        readout: ReadoutError::symmetric(0.012),
        readout_overrides: Default::default(),
    }
}

/// Everything a run depends on. Fields missing from a JSON file take their
/// defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Bell-diagonal preparation angles, radians.
    pub theta1: f64,
    pub theta2: f64,
    /// Inverse temperature of the environment qubit.
    pub beta: f64,
    pub shots: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub mode: RunMode,
    /// Used in noisy mode only.
    pub noise: NoiseModel,
    /// Choose interference angles by noisy simulation (noisy mode only).
    pub mitigate: bool,
    /// Fixed interference angle when not mitigating.
    pub theta: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            theta1: REFERENCE_THETA1,
            theta2: REFERENCE_THETA2,
            beta: 1.0,
            shots: 8192,
            repetitions: 10,
            seed: 20220501,
            mode: RunMode::Exact,
            noise: default_noise(),
            mitigate: true,
            theta: std::f64::consts::FRAC_PI_2,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("beta", self.beta),
            ("theta", self.theta),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.mode != RunMode::Exact && self.repetitions < 2 {
            return Err(Error::Config(
                "shot-based modes need at least 2 repetitions to estimate a standard deviation"
                    .into(),
            ));
        }
        if self.theta.sin().abs() <= MIN_SIN_THETA {
            return Err(Error::DegenerateAngle(self.theta));
        }
        self.noise.validate()
    }

    /// The noise model in effect for this mode.
    pub fn active_noise(&self) -> Option<&NoiseModel> {
        (self.mode == RunMode::Noisy).then_some(&self.noise)
    }
}
