//! Beam loss per module and the weighted total.
//!
//! A module's loss is the fraction of the reference intensity missing from
//! its energy-phase projection, `clamp(1 - S / reference, 0, 1)`. The total
//! loss is the dot product of a 48-entry weight vector with the module
//! losses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{BeamState, LatentPoint, LatentSystem, LatentTrajectory, Settings, MODULES};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Weights(Vec<f64>);

impl TryFrom<Vec<f64>> for Weights {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        Self::new(w)
    }
}

impl From<Weights> for Vec<f64> {
    fn from(w: Weights) -> Self {
        w.0
    }
}

impl Weights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.len() != MODULES {
            return Err(Error::invalid(format!(
                "weights need {MODULES} entries, got {}",
                w.len()
            )));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid("weights must not all be zero"));
        }
        Ok(Self(w))
    }

    /// Zero for modules 1..=47, one for module 48.
    pub fn step() -> Self {
        let mut w = vec![0.0; MODULES];
        w[MODULES - 1] = 1.0;
        Self(w)
    }

    pub fn uniform() -> Self {
        Self(vec![1.0 / MODULES as f64; MODULES])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BeamLossVector(Vec<f64>);

impl TryFrom<Vec<f64>> for BeamLossVector {
    type Error = Error;

    fn try_from(l: Vec<f64>) -> Result<Self> {
        Self::new(l)
    }
}

impl From<BeamLossVector> for Vec<f64> {
    fn from(l: BeamLossVector) -> Self {
        l.0
    }
}

impl BeamLossVector {
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        if losses.len() != MODULES {
            return Err(Error::invalid(format!(
                "loss vector needs {MODULES} entries, got {}",
                losses.len()
            )));
        }
        if losses.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::invalid("module losses must lie in [0, 1]"));
        }
        Ok(Self(losses))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn module_beam_loss(state: &BeamState, reference_intensity: f64) -> f64 {
    let survived: f64 = state.loss_projection().iter().sum();
    (1.0 - survived / reference_intensity).clamp(0.0, 1.0)
}

pub fn total_beam_loss(losses: &[f64], weights: &[f64]) -> Result<f64> {
    if losses.len() != weights.len() {
        return Err(Error::invalid(format!(
            "{} losses against {} weights",
            losses.len(),
            weights.len()
        )));
    }
    Ok(losses.iter().zip(weights).map(|(l, w)| l * w).sum())
}

/// Everything produced while scoring one initial latent.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub total_loss: f64,
    pub trajectory: LatentTrajectory,
    pub states: Vec<BeamState>,
    pub settings: Settings,
    pub losses: BeamLossVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub weights: Weights,
    pub reference_intensity: f64,
}

impl Objective {
    pub fn new(weights: Weights, reference_intensity: f64) -> Result<Self> {
        if !(reference_intensity > 0.0 && reference_intensity.is_finite()) {
            return Err(Error::invalid("reference intensity must be positive"));
        }
        Ok(Self {
            weights,
            reference_intensity,
        })
    }

    /// forecast -> decode -> estimate -> per-module loss -> weighted total.
    pub fn evaluate<S: LatentSystem + ?Sized>(&self, system: &S, z1: &LatentPoint) -> Evaluation {
        let trajectory = system.forecast(z1);
        let states = system.decode(&trajectory);
        let settings = system.estimate(&trajectory);
        let losses: Vec<f64> = states
            .iter()
            .map(|s| module_beam_loss(s, self.reference_intensity))
            .collect();
        let total_loss = total_beam_loss(&losses, self.weights.as_slice())
            .expect("decoder yields one state per module");
        Evaluation {
            total_loss,
            trajectory,
            states,
            settings,
            losses: BeamLossVector(losses),
        }
    }
}
