//! Expected improvement and its maximisation over a box.
//!
//! The surrogate models a quantity to be maximised (the negated total beam
//! loss). For posterior mean `mu`, standard deviation `sigma`, incumbent
//! `best` and exploration margin `xi`:
//!
//! ```text
//! EI = (mu - best - xi) * Phi(t) + sigma * phi(t),   t = (mu - best - xi) / sigma
//! EI = 0                                             if sigma = 0
//! ```
//!
//! [`propose_next`] maximises EI by scoring seeded uniform candidates and then
//! nudging the winner with small coordinate perturbations.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gp::GpModel;
use crate::rng::SeededRng;
use crate::system::BoundsBox;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Refinement step size as a fraction of the box width.
pub const REFINE_SCALE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct AcquisitionConfig {
    pub xi: f64,
    pub candidate_count: usize,
    pub refine_steps: usize,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            xi: 0.1,
            candidate_count: 1024,
            refine_steps: 64,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return Err(Error::invalid("xi must be non-negative and finite"));
        }
        if self.candidate_count == 0 {
            return Err(Error::invalid("candidate_count must be at least 1"));
        }
        Ok(())
    }
}

pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Phi(x) = erfc(-x / sqrt 2) / 2`; the complementary form keeps the lower
/// tail accurate.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn expected_improvement(mean: f64, std: f64, best: f64, xi: f64) -> Result<f64> {
    if std < 0.0 {
        return Err(Error::invalid(format!(
            "standard deviation {std} is negative"
        )));
    }
    if !(mean.is_finite() && std.is_finite() && best.is_finite() && xi.is_finite()) {
        return Err(Error::invalid(
            "expected improvement needs finite arguments",
        ));
    }
    Ok(ei_unchecked(mean, std, best, xi))
}

#[inline]
fn ei_unchecked(mean: f64, std: f64, best: f64, xi: f64) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    let gap = mean - best - xi;
    let t = gap / std;
    (gap * std_normal_cdf(t) + std * std_normal_pdf(t)).max(0.0)
}

fn ei_at(model: &GpModel, x: &[f64], best: f64, xi: f64) -> f64 {
    let (mean, var) = model.posterior_unchecked(x);
    ei_unchecked(mean, var.sqrt(), best, xi)
}

/// Next query point: the best of `candidate_count` uniform candidates (first
/// wins on ties), then `refine_steps` single-coordinate Gaussian nudges of
/// scale [`REFINE_SCALE`] x width, each kept only if it raises EI.
pub fn propose_next(
    model: &GpModel,
    bounds: &BoundsBox,
    cfg: &AcquisitionConfig,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    bounds.validate()?;
    if bounds.dim() != model.params().dim() {
        return Err(Error::invalid(format!(
            "bounds have dimension {}, surrogate expects {}",
            bounds.dim(),
            model.params().dim()
        )));
    }
    let dim = bounds.dim();
    let best = model.best_target();

    let mut incumbent = vec![0.0; dim];
    let mut incumbent_ei = f64::NEG_INFINITY;
    let mut candidate = vec![0.0; dim];
    for _ in 0..cfg.candidate_count {
        for (d, v) in candidate.iter_mut().enumerate() {
            *v = bounds.scale(d, rng.random::<f64>());
        }
        let ei = ei_at(model, &candidate, best, cfg.xi);
        if ei > incumbent_ei {
            incumbent_ei = ei;
            incumbent.copy_from_slice(&candidate);
        }
    }

    let mut trial = incumbent.clone();
    for step in 0..cfg.refine_steps {
        let d = step % dim;
        let z: f64 = rng.sample(StandardNormal);
        trial.copy_from_slice(&incumbent);
        trial[d] =
            (trial[d] + z * REFINE_SCALE * bounds.width(d)).clamp(bounds.lower[d], bounds.upper[d]);
        let ei = ei_at(model, &trial, best, cfg.xi);
        if ei > incumbent_ei {
            incumbent_ei = ei;
            incumbent.copy_from_slice(&trial);
        }
    }
    Ok(incumbent)
}
