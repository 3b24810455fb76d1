//! Baselines sharing the tuner's budget and pruning: uniform random search and
//! a finite-difference Adam descent.
//!
//! Both produce [`RunResult`]s with the same schema as the tuner, use the
//! same per-run seed derivation, and record every objective evaluation in
//! `all_entries`, so `|all_entries| = iterations` for all three methods.

use crate::error::{Error, Result};
use crate::objective::{Objective, Weights};
use crate::rng::{run_seed, seeded};
use crate::system::{BoundsBox, LatentPoint, LatentSystem, LATENT_DIM};
use crate::tuner::{sample_initial, HistoryEntry, RunResult};

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineConfig {
    pub iterations: usize,
    pub runs: usize,
    pub bounds: BoundsBox,
    pub weights: Weights,
    pub seed: u64,
    pub step_size: f64,
    pub fd_epsilon: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Fixed starting point for gradient search. When absent each run starts
    /// from a uniform draw with its own seed.
    pub initial: Option<LatentPoint>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            runs: 10,
            bounds: BoundsBox::unit_latent(),
            weights: Weights::step(),
            seed: 1,
            step_size: 0.05,
            fd_epsilon: 1e-4,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            initial: None,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.runs == 0 {
            return Err(Error::invalid("iterations and runs must be positive"));
        }
        self.bounds.validate()?;
        if self.bounds.dim() != LATENT_DIM {
            return Err(Error::invalid(format!(
                "latent bounds need {LATENT_DIM} dimensions, got {}",
                self.bounds.dim()
            )));
        }
        self.adam().validate()?;
        if let Some(z) = &self.initial {
            if !self.bounds.contains(&z.0) {
                return Err(Error::invalid("initial point lies outside the bounds"));
            }
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamParams {
        AdamParams {
            step_size: self.step_size,
            fd_epsilon: self.fd_epsilon,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            eps: self.adam_eps,
        }
    }

    fn check_objective(&self, objective: &Objective) -> Result<()> {
        if objective.weights != self.weights {
            return Err(Error::invalid(
                "objective weights differ from the configured weights",
            ));
        }
        Ok(())
    }
}

pub fn random_search<S: LatentSystem + ?Sized>(
    cfg: &BaselineConfig,
    run_index: usize,
    system: &S,
    objective: &Objective,
) -> Result<RunResult> {
    cfg.validate()?;
    cfg.check_objective(objective)?;
    let seed = run_seed(cfg.seed, run_index as u64);
    let mut rng = seeded(seed);
    let mut entries = Vec::with_capacity(cfg.iterations);
    for iteration in 0..cfg.iterations {
        let z1 = sample_initial(&cfg.bounds, &mut rng)?;
        let eval = objective.evaluate(system, &z1);
        entries.push(HistoryEntry::from_evaluation(iteration, z1, eval, system));
    }
    Ok(RunResult::from_entries(run_index, seed, entries, 0))
}

pub fn gradient_search<S: LatentSystem + ?Sized>(
    cfg: &BaselineConfig,
    run_index: usize,
    system: &S,
    objective: &Objective,
) -> Result<RunResult> {
    cfg.validate()?;
    cfg.check_objective(objective)?;
    let seed = run_seed(cfg.seed, run_index as u64);
    let start = match &cfg.initial {
        Some(z) => *z,
        None => sample_initial(&cfg.bounds, &mut seeded(seed))?,
    };

    let mut entries = Vec::with_capacity(cfg.iterations);
    adam_minimize(
        |x| {
            let z1 = LatentPoint::from_slice(x).expect("iterates keep the latent dimension");
            let eval = objective.evaluate(system, &z1);
            let loss = eval.total_loss;
            entries.push(HistoryEntry::from_evaluation(
                entries.len(),
                z1,
                eval,
                system,
            ));
            loss
        },
        &start.0,
        &cfg.bounds,
        cfg.iterations,
        &cfg.adam(),
    )?;
    Ok(RunResult::from_entries(run_index, seed, entries, 0))
}

pub fn multi_random_search<S: LatentSystem + ?Sized>(
    cfg: &BaselineConfig,
    system: &S,
    objective: &Objective,
) -> Result<Vec<RunResult>> {
    (0..cfg.runs)
        .map(|r| random_search(cfg, r, system, objective))
        .collect()
}

pub fn multi_gradient_search<S: LatentSystem + ?Sized>(
    cfg: &BaselineConfig,
    system: &S,
    objective: &Objective,
) -> Result<Vec<RunResult>> {
    (0..cfg.runs)
        .map(|r| gradient_search(cfg, r, system, objective))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamParams {
    pub step_size: f64,
    pub fd_epsilon: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::invalid("step_size must be positive"));
        }
        if !(self.fd_epsilon > 0.0 && self.fd_epsilon.is_finite()) {
            return Err(Error::invalid("fd_epsilon must be positive"));
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2)) {
            return Err(Error::invalid("Adam betas must lie in [0, 1)"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("adam_eps must be positive"));
        }
        Ok(())
    }
}

/// Path of an [`adam_minimize`] call.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamTrace {
    /// Start point followed by every completed update.
    pub iterates: Vec<Vec<f64>>,
    pub evaluations: usize,
}

impl AdamTrace {
    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("trace holds the start point")
    }
}

/// Minimises `f` with Adam on central finite differences, calling `f`
/// exactly `budget` times.
///
/// Each step evaluates the current iterate, then probes `x +- h e_d` for
/// every coordinate (probes are clipped to the bounds and the difference is
/// divided by the actual spacing), then takes one clipped Adam update. When
/// the budget runs out mid-step the step is abandoned.
pub fn adam_minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    bounds: &BoundsBox,
    budget: usize,
    params: &AdamParams,
) -> Result<AdamTrace> {
    params.validate()?;
    bounds.validate()?;
    if start.len() != bounds.dim() || !bounds.contains(start) {
        return Err(Error::invalid("start point must lie inside the bounds"));
    }
    let dim = start.len();
    let mut x = start.to_vec();
    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut probe = x.clone();
    let mut iterates = vec![x.clone()];
    let mut used = 0;
    let mut t = 0;

    'steps: while used < budget {
        f(&x);
        used += 1;
        for d in 0..dim {
            if used + 2 > budget {
                while used < budget {
                    f(&x);
                    used += 1;
                }
                break 'steps;
            }
            let hi = (x[d] + params.fd_epsilon).min(bounds.upper[d]);
            let lo = (x[d] - params.fd_epsilon).max(bounds.lower[d]);
            probe.copy_from_slice(&x);
            probe[d] = hi;
            let f_hi = f(&probe);
            probe[d] = lo;
            let f_lo = f(&probe);
            used += 2;
            grad[d] = if hi > lo {
                (f_hi - f_lo) / (hi - lo)
            } else {
                0.0
            };
        }
        t += 1;
        let c1 = 1.0 - params.beta1.powi(t);
        let c2 = 1.0 - params.beta2.powi(t);
        for d in 0..dim {
            m[d] = params.beta1 * m[d] + (1.0 - params.beta1) * grad[d];
            v[d] = params.beta2 * v[d] + (1.0 - params.beta2) * grad[d] * grad[d];
            let step = params.step_size * (m[d] / c1) / ((v[d] / c2).sqrt() + params.eps);
            x[d] = (x[d] - step).clamp(bounds.lower[d], bounds.upper[d]);
        }
        iterates.push(x.clone());
    }
    Ok(AdamTrace {
        iterates,
        evaluations: used,
    })
}
