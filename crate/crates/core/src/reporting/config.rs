//! TOML experiment configuration.
//!
//! ```toml
//! [bounds]
//! lower = [-1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0]
//! upper = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
//!
//! [tuner]
//! iterations = 200
//! runs = 10
//! xi = 0.1
//! seed = 1
//! candidate_count = 1024
//! refine_steps = 64
//! initial_design = 8
//! # gradient baseline
//! step_size = 0.05
//! fd_epsilon = 1e-4
//! adam_beta1 = 0.9
//! adam_beta2 = 0.999
//! adam_eps = 1e-8
//! gradient_initial = [0.95, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
//!
//! [system]
//! asset = "path/to/system.json"   # default: the built-in system
//!
//! [objective]
//! weights = "step"                # "step", "uniform" or 48 numbers
//! reference_intensity = 8.0       # default: taken from the system
//! ```
//!
//! Every section and key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineConfig;
use crate::error::{Error, Result};
use crate::objective::{Objective, Weights};
use crate::system::{BoundsBox, LatentPoint, SyntheticSystem};
use crate::tuner::TunerConfig;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bounds: BoundsSection,
    pub tuner: TunerSection,
    pub system: SystemSection,
    pub objective: ObjectiveSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        let b = BoundsBox::unit_latent();
        Self {
            lower: b.lower,
            upper: b.upper,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TunerSection {
    pub iterations: usize,
    pub runs: usize,
    pub xi: f64,
    pub seed: u64,
    pub candidate_count: usize,
    pub refine_steps: usize,
    pub initial_design: usize,
    pub step_size: f64,
    pub fd_epsilon: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub gradient_initial: Option<Vec<f64>>,
}

impl Default for TunerSection {
    fn default() -> Self {
        let t = TunerConfig::default();
        let b = BaselineConfig::default();
        Self {
            iterations: t.iterations,
            runs: t.runs,
            xi: t.xi,
            seed: t.seed,
            candidate_count: t.candidate_count,
            refine_steps: t.refine_steps,
            initial_design: t.initial_design,
            step_size: b.step_size,
            fd_epsilon: b.fd_epsilon,
            adam_beta1: b.adam_beta1,
            adam_beta2: b.adam_beta2,
            adam_eps: b.adam_eps,
            gradient_initial: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub asset: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Preset(String),
    Explicit(Vec<f64>),
}

impl WeightSpec {
    pub fn resolve(&self) -> Result<Weights> {
        match self {
            WeightSpec::Preset(name) => match name.as_str() {
                "step" => Ok(Weights::step()),
                "uniform" => Ok(Weights::uniform()),
                other => Err(Error::Config(format!("unknown weight preset '{other}'"))),
            },
            WeightSpec::Explicit(w) => Weights::new(w.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveSection {
    pub weights: WeightSpec,
    pub reference_intensity: Option<f64>,
}

impl Default for ObjectiveSection {
    fn default() -> Self {
        Self {
            weights: WeightSpec::Preset("step".into()),
            reference_intensity: None,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; a relative `[system] asset` path is resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if let (Some(asset), Some(dir)) = (&cfg.system.asset, path.parent()) {
            if asset.is_relative() {
                cfg.system.asset = Some(dir.join(asset));
            }
        }
        Ok(cfg)
    }

    pub fn bounds(&self) -> Result<BoundsBox> {
        BoundsBox::new(self.bounds.lower.clone(), self.bounds.upper.clone())
    }

    pub fn weights(&self) -> Result<Weights> {
        self.objective.weights.resolve()
    }

    pub fn tuner(&self) -> Result<TunerConfig> {
        let t = &self.tuner;
        let cfg = TunerConfig {
            iterations: t.iterations,
            runs: t.runs,
            xi: t.xi,
            bounds: self.bounds()?,
            weights: self.weights()?,
            candidate_count: t.candidate_count,
            refine_steps: t.refine_steps,
            seed: t.seed,
            initial_design: t.initial_design,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn baseline(&self) -> Result<BaselineConfig> {
        let t = &self.tuner;
        let cfg = BaselineConfig {
            iterations: t.iterations,
            runs: t.runs,
            bounds: self.bounds()?,
            weights: self.weights()?,
            seed: t.seed,
            step_size: t.step_size,
            fd_epsilon: t.fd_epsilon,
            adam_beta1: t.adam_beta1,
            adam_beta2: t.adam_beta2,
            adam_eps: t.adam_eps,
            initial: t
                .gradient_initial
                .as_deref()
                .map(LatentPoint::from_slice)
                .transpose()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn system(&self) -> Result<SyntheticSystem> {
        match &self.system.asset {
            Some(path) => SyntheticSystem::from_asset_json(&std::fs::read_to_string(path)?),
            None => SyntheticSystem::load_default(),
        }
    }

    pub fn objective(&self, system: &SyntheticSystem) -> Result<Objective> {
        let reference = self
            .objective
            .reference_intensity
            .unwrap_or_else(|| system.reference_intensity());
        Objective::new(self.weights()?, reference)
    }
}
