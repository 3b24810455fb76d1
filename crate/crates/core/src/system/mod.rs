//! Latent-system interfaces and the synthetic testbed that implements them.
//!
//! A latent system bundles the four learned components the tuner drives:
//! a forecaster rolling `z1` out to a 48-step trajectory, a decoder producing
//! per-module beam states, an estimator recovering the RF settings, and a
//! classifier labelling each beam state with its module. [`SyntheticSystem`]
//! implements all four from a fixed set of seeded constants.

mod constants;
mod synthetic;
mod types;

pub use constants::{
    ClassifierConstants, DecoderConstants, Landscape, Manifold, SyntheticConstants, ASSET_SCHEMA,
    ASSET_VERSION, DEFAULT_ASSET_JSON, SYSTEM_SEED,
};
pub use synthetic::{beam_features, SyntheticSystem, FEATURES_PER_PROJECTION};
pub use types::{
    BeamState, BoundsBox, ClassLabel, LatentPoint, LatentTrajectory, Settings, GRID, LATENT_DIM,
    LOSS_PROJECTION, MODULES, PROJECTIONS,
};

/// Rolls the initial latent point forward through the modules.
pub trait Forecaster {
    /// `points[0]` of the result is `z1`, bit for bit.
    fn forecast(&self, z1: &LatentPoint) -> LatentTrajectory;
}

pub trait Decoder {
    /// One state per module, in module order.
    fn decode(&self, trajectory: &LatentTrajectory) -> Vec<BeamState>;
}

pub trait Estimator {
    fn estimate(&self, trajectory: &LatentTrajectory) -> Settings;
}

pub trait Classifier {
    fn classify(&self, state: &BeamState) -> ClassLabel;

    /// True iff every state is labelled with its own module number.
    fn trajectory_passes(&self, states: &[BeamState]) -> bool {
        states.len() == MODULES
            && states
                .iter()
                .enumerate()
                .all(|(i, s)| self.classify(s) == ClassLabel::Module(i + 1))
    }
}

/// Everything the tuner needs from a latent evolution model.
pub trait LatentSystem: Forecaster + Decoder + Estimator + Classifier + Sync {}

impl<T> LatentSystem for T where T: Forecaster + Decoder + Estimator + Classifier + Sync {}
