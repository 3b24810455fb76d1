//! Constants of the synthetic latent system and how they are generated.
//!
//! Random constants are drawn once from a ChaCha8 stream seeded with
//! [`SYSTEM_SEED`] in a fixed order (see [`SyntheticConstants::generate`]);
//! the manifold and loss landscape are hand-set. The generated set is
//! committed as `assets/synthetic_v1.json` and loaded through
//! [`SyntheticSystem::load_default`](super::SyntheticSystem::load_default).
//!
//! Forecaster: `z_{t+1} = tanh(A z_t + b)`, `A` rescaled to spectral radius
//! 0.9.
//!
//! Estimator: `y = clip(C z1, -0.5, 0.5)`.
//!
//! Decoder, module `m`, projection `k`, latent `z = z_m`:
//!
//! ```text
//! centre      = base_centre[m][k] + center_gain[k] * (z0, z1)
//! widths      = base_width[m][k] * exp(width_gain[k] * (z2, z3))
//! intensity   = I_beam * sigmoid(amplitude_gain[k] * z4 + amplitude_bias[m][k])   (k != 11)
//!             = I_beam * exp(-(m / 48) * Q(z_1))                                  (k == 11)
//! background  = level * (1 + 0.25 tanh(background_gain[m] . z[5..8])) * pattern_m (k != 11)
//! ```
//!
//! where `z_1` is the initial latent of the trajectory and
//! `Q(z) = base_cost + sum_d curvature_d * (u^2 + ripple * (1 - cos(freq * u)))`,
//! `u = z_d - optimum_d`. The blob is an axis-aligned Gaussian normalised to
//! unit pixel sum on the grid. Outside the physical manifold a fraction
//! `ghost_fraction * h` of each blob moves into a ghost copy displaced by
//! `ghost_offset[m][k]`, with `h = clamp(hallucination_gain * (d - r), 0, 1)`
//! and `d` the sup-norm distance of `z_1` from the manifold centre.

use nalgebra::SMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::types::{BoundsBox, LatentPoint, LATENT_DIM, MODULES, PROJECTIONS};
use crate::asset;
use crate::error::{Error, Result};
use crate::rng::{seeded, SeededRng};

pub const SYSTEM_SEED: u64 = 42;
pub const ASSET_SCHEMA: &str = "cbol-synthetic-system";
pub const ASSET_VERSION: u32 = 1;
pub const DEFAULT_ASSET_JSON: &str = include_str!("../../assets/synthetic_v1.json");

const SPECTRAL_RADIUS: f64 = 0.9;
const PROTOTYPE_SAMPLES: usize = 256;
const CALIBRATION_SAMPLES: usize = 512;
/// Threshold = margin x largest prototype distance seen on the manifold.
const THRESHOLD_MARGIN: f64 = 1.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConstants {
    pub seed: u64,
    pub forecast_matrix: [[f64; LATENT_DIM]; LATENT_DIM],
    pub forecast_bias: [f64; LATENT_DIM],
    pub estimator_matrix: [[f64; LATENT_DIM]; LATENT_DIM],
    pub decoder: DecoderConstants,
    pub manifold: Manifold,
    pub landscape: Landscape,
    pub classifier: ClassifierConstants,
    /// Projection-11 pixel sum of a beam that loses nothing.
    pub reference_intensity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConstants {
    pub beam_intensity: f64,
    /// `[module][projection] -> (x, y)` in pixel coordinates.
    pub base_centers: Vec<Vec<[f64; 2]>>,
    pub base_widths: Vec<Vec<[f64; 2]>>,
    pub ghost_offsets: Vec<Vec<[f64; 2]>>,
    /// Per projection, row `i` maps `(z0, z1)` onto centre axis `i`.
    pub center_gains: Vec<[[f64; 2]; 2]>,
    pub width_gains: Vec<[f64; 2]>,
    pub amplitude_gains: Vec<f64>,
    pub amplitude_biases: Vec<Vec<f64>>,
    pub background_level: f64,
    /// Per module `(freq_x, freq_y, phase_x, phase_y)`.
    pub background_waves: Vec<[f64; 4]>,
    pub background_gains: Vec<[f64; 3]>,
    pub ghost_fraction: f64,
    pub hallucination_gain: f64,
}

/// `M = { z : |z - center|_inf <= radius }` (inside the default box).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifold {
    pub center: [f64; LATENT_DIM],
    pub radius: f64,
}

impl Manifold {
    pub fn distance(&self, z: &LatentPoint) -> f64 {
        z.0.iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, z: &LatentPoint) -> bool {
        self.distance(z) <= self.radius
    }

    /// `M` intersected with `bounds`, as a box.
    pub fn box_within(&self, bounds: &BoundsBox) -> Result<BoundsBox> {
        let lower = (0..LATENT_DIM)
            .map(|d| (self.center[d] - self.radius).max(bounds.lower[d]))
            .collect();
        let upper = (0..LATENT_DIM)
            .map(|d| (self.center[d] + self.radius).min(bounds.upper[d]))
            .collect();
        BoundsBox::new(lower, upper)
    }
}

/// Separable transmission landscape; see the module docs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Landscape {
    pub optimum: [f64; LATENT_DIM],
    pub curvature: [f64; LATENT_DIM],
    pub ripple: f64,
    pub ripple_frequency: f64,
    pub base_cost: f64,
}

impl Landscape {
    /// Contribution of coordinate `d` to `Q`.
    pub fn coordinate_cost(&self, d: usize, x: f64) -> f64 {
        let u = x - self.optimum[d];
        self.curvature[d] * (u * u + self.ripple * (1.0 - (self.ripple_frequency * u).cos()))
    }

    pub fn cost(&self, z: &LatentPoint) -> f64 {
        self.base_cost
            + (0..LATENT_DIM)
                .map(|d| self.coordinate_cost(d, z.0[d]))
                .sum::<f64>()
    }

    /// Fraction of the beam still present at module `m` (1-based).
    pub fn survival(&self, module: usize, z: &LatentPoint) -> f64 {
        (-(module as f64 / MODULES as f64) * self.cost(z)).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierConstants {
    /// One feature vector per module, averaged over manifold samples.
    pub prototypes: Vec<Vec<f64>>,
    pub threshold: f64,
    pub prototype_samples: usize,
}

impl SyntheticConstants {
    /// Draws the full constant set from `seed`.
    ///
    /// Draw order from one ChaCha8 stream: `A` (64 x U(-1,1), row-major),
    /// `b` (8 x U(-0.1,0.1)), `C` (64 x U(-0.6,0.6)); then per module and
    /// projection the base centre (2 x U(10,21)), base widths (2 x U(2,3.5))
    /// and amplitude bias (U(-1,1)); then per projection the centre gains
    /// (4 x U(-1,1)), width gains (2 x U(-0.15,0.15)) and amplitude gain
    /// (U(-1,1)); then per module the background frequencies (2 x {1,2,3}),
    /// phases (2 x U(0,2pi)) and gains (3 x U(-1,1)); finally the manifold
    /// samples used for prototypes and threshold calibration.
    pub fn generate(seed: u64) -> Result<Self> {
        let mut rng = seeded(seed);

        let mut a = [[0.0; LATENT_DIM]; LATENT_DIM];
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = uniform(-1.0, 1.0, &mut rng);
            }
        }
        let radius = spectral_radius(&a);
        if radius <= 0.0 {
            return Err(Error::Numerical(
                "forecast matrix has zero spectral radius".into(),
            ));
        }
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v *= SPECTRAL_RADIUS / radius;
            }
        }
        let mut b = [0.0; LATENT_DIM];
        for v in b.iter_mut() {
            *v = uniform(-0.1, 0.1, &mut rng);
        }
        let mut c = [[0.0; LATENT_DIM]; LATENT_DIM];
        for row in c.iter_mut() {
            for v in row.iter_mut() {
                *v = uniform(-0.6, 0.6, &mut rng);
            }
        }

        let grid_mid = (super::types::GRID as f64 - 1.0) / 2.0;
        let mut base_centers = vec![vec![[0.0; 2]; PROJECTIONS]; MODULES];
        let mut base_widths = vec![vec![[0.0; 2]; PROJECTIONS]; MODULES];
        let mut ghost_offsets = vec![vec![[0.0; 2]; PROJECTIONS]; MODULES];
        let mut amplitude_biases = vec![vec![0.0; PROJECTIONS]; MODULES];
        for m in 0..MODULES {
            for k in 0..PROJECTIONS {
                let centre = [uniform(10.0, 21.0, &mut rng), uniform(10.0, 21.0, &mut rng)];
                base_centers[m][k] = centre;
                base_widths[m][k] = [uniform(2.0, 3.5, &mut rng), uniform(2.0, 3.5, &mut rng)];
                amplitude_biases[m][k] = uniform(-1.0, 1.0, &mut rng);
                // ghosts are displaced towards the grid centre so they stay on the grid
                ghost_offsets[m][k] = centre.map(|v| if v < grid_mid { 7.0 } else { -7.0 });
            }
        }
        let mut center_gains = vec![[[0.0; 2]; 2]; PROJECTIONS];
        let mut width_gains = vec![[0.0; 2]; PROJECTIONS];
        let mut amplitude_gains = vec![0.0; PROJECTIONS];
        for k in 0..PROJECTIONS {
            for row in center_gains[k].iter_mut() {
                for v in row.iter_mut() {
                    *v = uniform(-1.0, 1.0, &mut rng);
                }
            }
            width_gains[k] = [
                uniform(-0.15, 0.15, &mut rng),
                uniform(-0.15, 0.15, &mut rng),
            ];
            amplitude_gains[k] = uniform(-1.0, 1.0, &mut rng);
        }
        let mut background_waves = vec![[0.0; 4]; MODULES];
        let mut background_gains = vec![[0.0; 3]; MODULES];
        for m in 0..MODULES {
            let fx = 1.0 + (3.0 * rng.random::<f64>()).floor();
            let fy = 1.0 + (3.0 * rng.random::<f64>()).floor();
            let tau = std::f64::consts::TAU;
            background_waves[m] = [
                fx,
                fy,
                uniform(0.0, tau, &mut rng),
                uniform(0.0, tau, &mut rng),
            ];
            background_gains[m] = [
                uniform(-1.0, 1.0, &mut rng),
                uniform(-1.0, 1.0, &mut rng),
                uniform(-1.0, 1.0, &mut rng),
            ];
        }

        let beam_intensity = 8.0;
        let decoder = DecoderConstants {
            beam_intensity,
            base_centers,
            base_widths,
            ghost_offsets,
            center_gains,
            width_gains,
            amplitude_gains,
            amplitude_biases,
            background_level: 0.001,
            background_waves,
            background_gains,
            ghost_fraction: 0.5,
            hallucination_gain: 200.0,
        };

        let mut constants = SyntheticConstants {
            seed,
            forecast_matrix: a,
            forecast_bias: b,
            estimator_matrix: c,
            decoder,
            manifold: default_manifold(),
            landscape: default_landscape(),
            classifier: ClassifierConstants {
                prototypes: Vec::new(),
                threshold: 0.0,
                prototype_samples: PROTOTYPE_SAMPLES,
            },
            reference_intensity: beam_intensity,
        };
        constants.classifier = super::synthetic::calibrate_classifier(
            &constants,
            &mut rng,
            PROTOTYPE_SAMPLES,
            CALIBRATION_SAMPLES,
            THRESHOLD_MARGIN,
        )?;
        Ok(constants)
    }

    pub fn to_asset_json(&self) -> Result<String> {
        asset::seal(ASSET_SCHEMA, ASSET_VERSION, self)
    }

    pub fn from_asset_json(text: &str) -> Result<Self> {
        asset::open(text, ASSET_SCHEMA, ASSET_VERSION)
    }
}

/// Centre shifted along `z0` so points at sup-distance `2r` exist inside
/// `[-1, 1]^8`. Both values are dyadic, so the edges of `M` are exact.
fn default_manifold() -> Manifold {
    let mut center = [0.0; LATENT_DIM];
    center[0] = -0.625;
    Manifold {
        center,
        radius: 0.8125,
    }
}

/// Unconstrained optimum sits at `z0 = 0.35`, just outside `M` (`z0 <= 0.1875`).
fn default_landscape() -> Landscape {
    Landscape {
        optimum: [0.35, 0.35, -0.40, 0.20, -0.15, 0.45, -0.30, 0.10],
        curvature: [0.15, 0.3, 0.25, 0.2, 0.15, 0.1, 0.08, 0.06],
        ripple: 0.02,
        ripple_frequency: 12.0,
        base_cost: 0.15,
    }
}

fn uniform(lo: f64, hi: f64, rng: &mut SeededRng) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn spectral_radius(a: &[[f64; LATENT_DIM]; LATENT_DIM]) -> f64 {
    let m = SMatrix::<f64, LATENT_DIM, LATENT_DIM>::from_fn(|i, j| a[i][j]);
    m.complex_eigenvalues()
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forecast_matrix_has_target_spectral_radius() {
        let c = SyntheticConstants::from_asset_json(DEFAULT_ASSET_JSON).unwrap();
        assert!((spectral_radius(&c.forecast_matrix) - SPECTRAL_RADIUS).abs() < 1e-9);
    }

    #[test]
    fn committed_asset_matches_generation() {
        let committed = SyntheticConstants::from_asset_json(DEFAULT_ASSET_JSON).unwrap();
        let fresh = SyntheticConstants::generate(SYSTEM_SEED).unwrap();
        assert_eq!(committed, fresh);
        assert_eq!(fresh.to_asset_json().unwrap(), DEFAULT_ASSET_JSON);
    }

    #[test]
    fn unconstrained_optimum_lies_outside_manifold() {
        let c = SyntheticConstants::from_asset_json(DEFAULT_ASSET_JSON).unwrap();
        let opt = LatentPoint::new(c.landscape.optimum).unwrap();
        assert!(!c.manifold.contains(&opt));
        let m = c.manifold.box_within(&BoundsBox::unit_latent()).unwrap();
        assert_eq!(m.lower[0], -1.0);
        assert_eq!(m.upper[0], 0.1875);
        assert_eq!(m.upper[1], 0.8125);
    }

    #[test]
    fn survival_decreases_along_the_linac() {
        let c = SyntheticConstants::from_asset_json(DEFAULT_ASSET_JSON).unwrap();
        let z = LatentPoint::zeros();
        let s: Vec<f64> = (1..=MODULES).map(|m| c.landscape.survival(m, &z)).collect();
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        assert!(s[MODULES - 1] > 0.0 && s[0] < 1.0);
    }
}
