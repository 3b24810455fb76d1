//! Classifier-pruned Bayesian optimisation over a temporally structured
//! latent space.
//!
//! The search variable is the initial latent point `z1` of an 8-dimensional
//! latent space. Every candidate is rolled out into a 48-step trajectory by a
//! forecaster, decoded into per-module beam states, scored with a weighted
//! beam-loss objective and finally checked by a classifier that rejects
//! trajectories which do not decode into physical beams.
//!
//! The crate is organised bottom-up:
//!
//! * [`gp`] – Gaussian-process surrogate over the latent search space.
//! * [`acquisition`] – expected improvement and its maximisation in a box.
//! * [`system`] – forecaster/decoder/estimator/classifier interfaces and the
//!   synthetic, ground-truth-known implementation of them.
//! * [`objective`] – per-module beam loss and the weighted total.
//! * [`tuner`] – the classifier-pruned optimisation loop and multi-run driver.
//! * [`baselines`] – pruned random search and an Adam finite-difference search.
//! * [`reporting`] – summaries, comparisons, the ground-truth oracle, file
//!   formats and configuration.

pub mod acquisition;
pub mod asset;
pub mod baselines;
pub mod error;
pub mod gp;
pub mod objective;
pub mod reporting;
pub mod rng;
pub mod system;
pub mod tuner;

pub use acquisition::{expected_improvement, propose_next, AcquisitionConfig};
pub use baselines::{gradient_search, random_search, BaselineConfig};
pub use error::{Error, Result};
pub use gp::{kernel_eval, GpModel, KernelParams};
pub use objective::{BeamLossVector, Evaluation, Objective, Weights};
pub use rng::{run_seed, SeededRng};
pub use system::{
    BeamState, BoundsBox, ClassLabel, LatentPoint, LatentSystem, LatentTrajectory, Settings,
    SyntheticSystem, LATENT_DIM, MODULES, PROJECTIONS,
};
pub use tuner::{cbol_tune, multi_run, HistoryEntry, RunResult, TunerConfig};
