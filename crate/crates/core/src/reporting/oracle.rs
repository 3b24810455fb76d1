//! Ground-truth optimum of the synthetic system restricted to the physical
//! manifold.
//!
//! Every module loss of the synthetic system is an increasing function of the
//! separable cost `Q(z1) = base + sum_d q_d(z1_d)`, and the manifold is a box.
//! The constrained minimiser of any nonnegatively weighted total loss is
//! therefore found one coordinate at a time: each `q_d` is minimised on a
//! uniform grid over `M` intersected with the bounds, and the resulting point
//! is scored through the full objective.

use serde::{Deserialize, Serialize};

use crate::asset;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::system::{BoundsBox, LatentPoint, SyntheticSystem, LATENT_DIM};

pub const ORACLE_SCHEMA: &str = "cbol-oracle";
pub const ORACLE_VERSION: u32 = 1;
pub const DEFAULT_RESOLUTION: usize = 10_000;
/// Oracle of the built-in system under step weights and the unit box.
pub const DEFAULT_ORACLE_JSON: &str = include_str!("../../assets/oracle_v1.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleResult {
    pub z_star: LatentPoint,
    pub loss: f64,
    pub resolution: usize,
}

impl OracleResult {
    pub fn to_json(&self) -> Result<String> {
        asset::seal(ORACLE_SCHEMA, ORACLE_VERSION, self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        asset::open(text, ORACLE_SCHEMA, ORACLE_VERSION)
    }

    pub fn load_default() -> Result<Self> {
        Self::from_json(DEFAULT_ORACLE_JSON)
    }
}

/// Grid points `lo + (hi - lo) i / (n - 1)`; a single point sits at the
/// midpoint.
fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

pub fn run_oracle(
    system: &SyntheticSystem,
    objective: &Objective,
    bounds: &BoundsBox,
    resolution: usize,
) -> Result<OracleResult> {
    if resolution == 0 {
        return Err(Error::invalid("oracle resolution must be at least 1"));
    }
    bounds.validate()?;
    if bounds.dim() != LATENT_DIM {
        return Err(Error::invalid("oracle bounds must span the latent space"));
    }
    let c = system.constants();
    let region = c
        .manifold
        .box_within(bounds)
        .map_err(|_| Error::invalid("the physical manifold does not intersect the bounds"))?;
    let mut z = [0.0; LATENT_DIM];
    for (d, zd) in z.iter_mut().enumerate() {
        let mut best = (f64::INFINITY, region.lower[d]);
        for x in grid(region.lower[d], region.upper[d], resolution) {
            let q = c.landscape.coordinate_cost(d, x);
            if q < best.0 {
                best = (q, x);
            }
        }
        *zd = best.1;
    }
    let z_star = LatentPoint::new(z)?;
    let loss = objective.evaluate(system, &z_star).total_loss;
    Ok(OracleResult {
        z_star,
        loss,
        resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Weights;

    #[test]
    fn grid_endpoints() {
        let g: Vec<f64> = grid(-1.0, 1.0, 3).collect();
        assert_eq!(g, vec![-1.0, 0.0, 1.0]);
        assert_eq!(grid(0.0, 2.0, 1).collect::<Vec<_>>(), vec![1.0]);
    }

    #[test]
    fn oracle_point_lies_in_manifold() {
        let system = SyntheticSystem::load_default().unwrap();
        let objective = Objective::new(Weights::step(), system.reference_intensity()).unwrap();
        let r = run_oracle(&system, &objective, &BoundsBox::unit_latent(), 101).unwrap();
        assert!(system.in_manifold(&r.z_star));
        let back = OracleResult::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(run_oracle(&system, &objective, &BoundsBox::unit_latent(), 0).is_err());
    }

    #[test]
    fn committed_oracle_matches_recomputation() {
        let system = SyntheticSystem::load_default().unwrap();
        let objective = Objective::new(Weights::step(), system.reference_intensity()).unwrap();
        let fresh = run_oracle(
            &system,
            &objective,
            &BoundsBox::unit_latent(),
            DEFAULT_RESOLUTION,
        )
        .unwrap();
        assert_eq!(fresh, OracleResult::load_default().unwrap());
        assert_eq!(fresh.to_json().unwrap(), DEFAULT_ORACLE_JSON);
    }
}
