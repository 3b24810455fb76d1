//! The classifier-pruned Bayesian optimisation loop.
//!
//! One run:
//!
//! 1. Draw `initial_design` points uniformly in the bounds, evaluate them and
//!    fit the surrogate on the negated total losses.
//! 2. For each remaining iteration: propose the expected-improvement
//!    maximiser, evaluate it (forecast, decode, estimate, loss), refit the
//!    surrogate with the new observation, then run the classifier on the
//!    decoded trajectory.
//!
//! Every evaluation lands in `all_entries` and feeds the surrogate, whether
//! or not the classifier accepts it; pruning only decides membership of the
//! kept history `S`. Exactly `iterations` evaluations are made per run.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{propose_next, AcquisitionConfig};
use crate::error::{Error, Result};
use crate::gp::{GpModel, KernelParams};
use crate::objective::{BeamLossVector, Evaluation, Objective, Weights};
use crate::rng::{run_seed, seeded, SeededRng};
use crate::system::{BoundsBox, LatentPoint, LatentSystem, LatentTrajectory, Settings, LATENT_DIM};

#[derive(Clone, Debug, PartialEq)]
pub struct TunerConfig {
    pub iterations: usize,
    pub runs: usize,
    pub xi: f64,
    pub bounds: BoundsBox,
    pub weights: Weights,
    pub candidate_count: usize,
    pub refine_steps: usize,
    pub seed: u64,
    pub initial_design: usize,
}

impl Default for TunerConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            runs: 10,
            xi: 0.1,
            bounds: BoundsBox::unit_latent(),
            weights: Weights::step(),
            candidate_count: 1024,
            refine_steps: 64,
            seed: 1,
            initial_design: 8,
        }
    }
}

impl TunerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.runs == 0 || self.initial_design == 0 {
            return Err(Error::invalid(
                "iterations, runs and initial_design must be positive",
            ));
        }
        if self.initial_design > self.iterations {
            return Err(Error::invalid(format!(
                "initial_design {} exceeds iterations {}",
                self.initial_design, self.iterations
            )));
        }
        self.bounds.validate()?;
        if self.bounds.dim() != LATENT_DIM {
            return Err(Error::invalid(format!(
                "latent bounds need {LATENT_DIM} dimensions, got {}",
                self.bounds.dim()
            )));
        }
        self.acquisition().validate()
    }

    /// Objective over `system` with the configured weights.
    pub fn objective(&self, reference_intensity: f64) -> Result<Objective> {
        Objective::new(self.weights.clone(), reference_intensity)
    }

    pub fn acquisition(&self) -> AcquisitionConfig {
        AcquisitionConfig {
            xi: self.xi,
            candidate_count: self.candidate_count,
            refine_steps: self.refine_steps,
        }
    }
}

/// One evaluated point, in the order it was evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub z1: LatentPoint,
    pub trajectory: LatentTrajectory,
    pub settings: Settings,
    pub losses: BeamLossVector,
    pub total_loss: f64,
    pub passed_classifier: bool,
}

impl HistoryEntry {
    pub fn from_evaluation<S: LatentSystem + ?Sized>(
        iteration: usize,
        z1: LatentPoint,
        eval: Evaluation,
        system: &S,
    ) -> Self {
        let passed_classifier = system.trajectory_passes(&eval.states);
        Self {
            iteration,
            z1,
            trajectory: eval.trajectory,
            settings: eval.settings,
            losses: eval.losses,
            total_loss: eval.total_loss,
            passed_classifier,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run_index: usize,
    pub seed: u64,
    pub all_entries: Vec<HistoryEntry>,
    /// Number of observations the surrogate held at the end of the run
    /// (zero for methods without a surrogate).
    pub surrogate_observations: usize,
    kept: Vec<usize>,
    best: Option<usize>,
}

impl RunResult {
    pub fn from_entries(
        run_index: usize,
        seed: u64,
        all_entries: Vec<HistoryEntry>,
        surrogate_observations: usize,
    ) -> Self {
        let kept: Vec<usize> = all_entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.passed_classifier)
            .map(|(i, _)| i)
            .collect();
        let mut best: Option<usize> = None;
        for &i in &kept {
            if best.is_none_or(|b| all_entries[i].total_loss < all_entries[b].total_loss) {
                best = Some(i);
            }
        }
        Self {
            run_index,
            seed,
            all_entries,
            surrogate_observations,
            kept,
            best,
        }
    }

    /// The kept history `S`: entries accepted by the classifier.
    pub fn pruned_history(&self) -> impl Iterator<Item = &HistoryEntry> + '_ {
        self.kept.iter().map(|&i| &self.all_entries[i])
    }

    pub fn pruned_len(&self) -> usize {
        self.kept.len()
    }

    /// `S*`: the kept entry with the lowest total loss (first on ties).
    pub fn best(&self) -> Option<&HistoryEntry> {
        self.best.map(|i| &self.all_entries[i])
    }

    pub fn best_loss(&self) -> Option<f64> {
        self.best().map(|e| e.total_loss)
    }
}

pub fn sample_uniform(bounds: &BoundsBox, rng: &mut SeededRng) -> Vec<f64> {
    (0..bounds.dim())
        .map(|d| bounds.scale(d, rng.random::<f64>()))
        .collect()
}

/// Uniform draw of an initial latent point in `bounds`.
pub fn sample_initial(bounds: &BoundsBox, rng: &mut SeededRng) -> Result<LatentPoint> {
    LatentPoint::from_slice(&sample_uniform(bounds, rng))
}

pub fn cbol_tune<S: LatentSystem + ?Sized>(
    cfg: &TunerConfig,
    run_index: usize,
    system: &S,
    objective: &Objective,
) -> Result<RunResult> {
    cfg.validate()?;
    if objective.weights != cfg.weights {
        return Err(Error::invalid(
            "objective weights differ from the configured weights",
        ));
    }
    let seed = run_seed(cfg.seed, run_index as u64);
    let mut rng = seeded(seed);
    let acquisition = cfg.acquisition();

    let mut entries = Vec::with_capacity(cfg.iterations);
    let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(cfg.iterations);
    let mut targets: Vec<f64> = Vec::with_capacity(cfg.iterations);

    for iteration in 0..cfg.initial_design {
        let z1 = sample_initial(&cfg.bounds, &mut rng)?;
        let eval = objective.evaluate(system, &z1);
        inputs.push(z1.0.to_vec());
        targets.push(-eval.total_loss);
        entries.push(HistoryEntry::from_evaluation(iteration, z1, eval, system));
    }
    let mut surrogate = GpModel::fit(
        &inputs,
        &targets,
        KernelParams::heuristic(&cfg.bounds, &targets),
    )?;

    for iteration in cfg.initial_design..cfg.iterations {
        let z1 = LatentPoint::from_slice(&propose_next(
            &surrogate,
            &cfg.bounds,
            &acquisition,
            &mut rng,
        )?)?;
        let eval = objective.evaluate(system, &z1);
        let value = -eval.total_loss;
        targets.push(value);
        surrogate =
            surrogate.update_with(&z1.0, value, KernelParams::heuristic(&cfg.bounds, &targets))?;
        entries.push(HistoryEntry::from_evaluation(iteration, z1, eval, system));
    }

    Ok(RunResult::from_entries(
        run_index,
        seed,
        entries,
        surrogate.len(),
    ))
}

/// Runs `0..cfg.runs`, each with its own derived seed.
pub fn multi_run<S: LatentSystem + ?Sized>(
    cfg: &TunerConfig,
    system: &S,
    objective: &Objective,
) -> Result<Vec<RunResult>> {
    (0..cfg.runs)
        .map(|r| cbol_tune(cfg, r, system, objective))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SyntheticSystem;

    fn setup() -> (SyntheticSystem, Objective) {
        let system = SyntheticSystem::load_default().unwrap();
        let objective = Objective::new(Weights::step(), system.reference_intensity()).unwrap();
        (system, objective)
    }

    fn small(iterations: usize, initial_design: usize) -> TunerConfig {
        TunerConfig {
            iterations,
            runs: 1,
            initial_design,
            candidate_count: 64,
            refine_steps: 8,
            ..TunerConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(TunerConfig::default().validate().is_ok());
        assert!(small(4, 5).validate().is_err());
        assert!(small(0, 0).validate().is_err());
        let mut c = small(4, 1);
        c.bounds = BoundsBox::new(vec![0.0], vec![1.0]).unwrap();
        assert!(c.validate().is_err());
        let mut c = small(4, 1);
        c.xi = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_iteration_run() {
        let (system, objective) = setup();
        let r = cbol_tune(&small(1, 1), 0, &system, &objective).unwrap();
        assert_eq!(r.all_entries.len(), 1);
        let e = &r.all_entries[0];
        assert_eq!(r.best().is_some(), e.passed_classifier);
        assert_eq!(r.surrogate_observations, 1);
    }

    #[test]
    fn sample_initial_in_degenerate_box() {
        let eps = 1e-12;
        let bounds = BoundsBox::new(vec![0.3; 8], vec![0.3 + eps; 8]).unwrap();
        let mut rng = seeded(5);
        for _ in 0..100 {
            let z = sample_initial(&bounds, &mut rng).unwrap();
            assert!(bounds.contains(&z.0));
        }
        let a = sample_initial(&BoundsBox::unit_latent(), &mut seeded(8)).unwrap();
        let b = sample_initial(&BoundsBox::unit_latent(), &mut seeded(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn best_is_minimum_of_kept_entries() {
        let (system, objective) = setup();
        let r = cbol_tune(&small(20, 4), 3, &system, &objective).unwrap();
        let kept: Vec<&HistoryEntry> = r.pruned_history().collect();
        assert!(kept.iter().all(|e| e.passed_classifier));
        assert_eq!(
            kept.len(),
            r.all_entries.iter().filter(|e| e.passed_classifier).count()
        );
        if let Some(best) = r.best() {
            let min = kept
                .iter()
                .map(|e| e.total_loss)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(best.total_loss, min);
        }
        for (i, e) in r.all_entries.iter().enumerate() {
            assert_eq!(e.iteration, i);
            assert!(r_bounds_contains(&e.z1));
            assert_eq!(e.trajectory.initial(), &e.z1);
        }
    }

    fn r_bounds_contains(z: &LatentPoint) -> bool {
        BoundsBox::unit_latent().contains(&z.0)
    }

    #[test]
    fn run_result_best_tie_keeps_first() {
        let (system, objective) = setup();
        let z = LatentPoint::new([-0.25, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let e = HistoryEntry::from_evaluation(0, z, objective.evaluate(&system, &z), &system);
        assert!(e.passed_classifier);
        let mut e2 = e.clone();
        e2.iteration = 1;
        let r = RunResult::from_entries(0, 0, vec![e, e2], 0);
        assert_eq!(r.best().unwrap().iteration, 0);
    }
}
