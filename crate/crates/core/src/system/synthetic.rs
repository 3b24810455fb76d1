use rand::Rng;

use super::constants::{ClassifierConstants, SyntheticConstants, DEFAULT_ASSET_JSON};
use super::types::{
    BeamState, ClassLabel, LatentPoint, LatentTrajectory, Settings, GRID, LATENT_DIM,
    LOSS_PROJECTION, MODULES, PROJECTIONS,
};
use super::{Classifier, Decoder, Estimator, Forecaster};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Relative intensity, centroid `(x, y)` and spread `(x, y)`.
pub const FEATURES_PER_PROJECTION: usize = 5;

/// Ground-truth-known stand-in for the trained latent evolution model.
#[derive(Clone, Debug)]
pub struct SyntheticSystem {
    constants: SyntheticConstants,
}

impl SyntheticSystem {
    pub fn new(constants: SyntheticConstants) -> Result<Self> {
        let d = &constants.decoder;
        let shaped = |v: usize| v == MODULES;
        if !shaped(d.base_centers.len())
            || !shaped(d.base_widths.len())
            || !shaped(d.ghost_offsets.len())
            || !shaped(d.amplitude_biases.len())
            || !shaped(d.background_waves.len())
            || !shaped(d.background_gains.len())
            || d.base_centers.iter().any(|r| r.len() != PROJECTIONS)
            || d.base_widths.iter().any(|r| r.len() != PROJECTIONS)
            || d.ghost_offsets.iter().any(|r| r.len() != PROJECTIONS)
            || d.amplitude_biases.iter().any(|r| r.len() != PROJECTIONS)
            || d.center_gains.len() != PROJECTIONS
            || d.width_gains.len() != PROJECTIONS
            || d.amplitude_gains.len() != PROJECTIONS
        {
            return Err(Error::Asset(
                "decoder constants have the wrong shape".into(),
            ));
        }
        let c = &constants.classifier;
        if !c.prototypes.is_empty()
            && (c.prototypes.len() != MODULES
                || c.prototypes
                    .iter()
                    .any(|p| p.len() != PROJECTIONS * FEATURES_PER_PROJECTION))
        {
            return Err(Error::Asset(
                "classifier prototypes have the wrong shape".into(),
            ));
        }
        if constants.reference_intensity.is_nan() || constants.reference_intensity <= 0.0 {
            return Err(Error::Asset("reference intensity must be positive".into()));
        }
        Ok(Self { constants })
    }

    /// The committed seed-42 system.
    pub fn load_default() -> Result<Self> {
        Self::new(SyntheticConstants::from_asset_json(DEFAULT_ASSET_JSON)?)
    }

    pub fn from_asset_json(text: &str) -> Result<Self> {
        Self::new(SyntheticConstants::from_asset_json(text)?)
    }

    pub fn constants(&self) -> &SyntheticConstants {
        &self.constants
    }

    pub fn reference_intensity(&self) -> f64 {
        self.constants.reference_intensity
    }

    /// Ground-truth membership of the physical manifold.
    pub fn in_manifold(&self, z1: &LatentPoint) -> bool {
        self.constants.manifold.contains(z1)
    }

    /// Strength in `[0, 1]` of the ghost artefact decoded from `z1`.
    pub fn hallucination(&self, z1: &LatentPoint) -> f64 {
        let m = &self.constants.manifold;
        let excess = m.distance(z1) - m.radius;
        (self.constants.decoder.hallucination_gain * excess).clamp(0.0, 1.0)
    }

    /// Beam state of module `m` (1-based) from its latent and the
    /// trajectory's initial latent.
    pub fn render(&self, module: usize, z: &LatentPoint, z1: &LatentPoint) -> BeamState {
        let d = &self.constants.decoder;
        let (mi, zv) = (module - 1, &z.0);
        let ghost = d.ghost_fraction * self.hallucination(z1);
        let survival = self.constants.landscape.survival(module, z1);

        let wave = d.background_waves[mi];
        let g = d.background_gains[mi];
        let bg_level =
            d.background_level * (1.0 + 0.25 * (g[0] * zv[5] + g[1] * zv[6] + g[2] * zv[7]).tanh());
        let grid = GRID as f64;
        let tau = std::f64::consts::TAU;
        let bg_x: Vec<f64> = (0..GRID)
            .map(|j| 0.5 + 0.5 * (tau * wave[0] * j as f64 / grid + wave[2]).sin())
            .collect();
        let bg_y: Vec<f64> = (0..GRID)
            .map(|i| 0.5 + 0.5 * (tau * wave[1] * i as f64 / grid + wave[3]).sin())
            .collect();

        let mut projections = Vec::with_capacity(PROJECTIONS);
        for k in 0..PROJECTIONS {
            let gain = d.center_gains[k];
            let base = d.base_centers[mi][k];
            let cx = base[0] + gain[0][0] * zv[0] + gain[0][1] * zv[1];
            let cy = base[1] + gain[1][0] * zv[0] + gain[1][1] * zv[1];
            let w = d.base_widths[mi][k];
            let sx = w[0] * (d.width_gains[k][0] * zv[2]).exp();
            let sy = w[1] * (d.width_gains[k][1] * zv[3]).exp();
            let is_loss = k + 1 == LOSS_PROJECTION;
            let intensity = if is_loss {
                d.beam_intensity * survival
            } else {
                d.beam_intensity * sigmoid(d.amplitude_gains[k] * zv[4] + d.amplitude_biases[mi][k])
            };

            let gx = gaussian_profile(cx, sx);
            let gy = gaussian_profile(cy, sy);
            let off = d.ghost_offsets[mi][k];
            let hx = gaussian_profile(cx + off[0], sx);
            let hy = gaussian_profile(cy + off[1], sy);

            let mut img = vec![0.0; GRID * GRID];
            for i in 0..GRID {
                for j in 0..GRID {
                    let mut v = intensity * ((1.0 - ghost) * gy[i] * gx[j] + ghost * hy[i] * hx[j]);
                    if !is_loss {
                        v += bg_level * bg_y[i] * bg_x[j];
                    }
                    img[i * GRID + j] = v.clamp(0.0, 1.0);
                }
            }
            projections.push(img);
        }
        BeamState {
            module,
            projections,
        }
    }

    /// Feature-space distance from `state` to the nearest prototype.
    pub fn nearest_prototype(&self, state: &BeamState) -> (usize, f64) {
        let f = beam_features(state, self.constants.decoder.beam_intensity);
        nearest(&self.constants.classifier.prototypes, &f)
    }
}

impl Forecaster for SyntheticSystem {
    fn forecast(&self, z1: &LatentPoint) -> LatentTrajectory {
        rollout(
            &self.constants.forecast_matrix,
            &self.constants.forecast_bias,
            z1,
        )
    }
}

impl Decoder for SyntheticSystem {
    fn decode(&self, trajectory: &LatentTrajectory) -> Vec<BeamState> {
        let z1 = trajectory.initial();
        (1..=MODULES)
            .map(|m| self.render(m, trajectory.module(m), z1))
            .collect()
    }
}

impl Estimator for SyntheticSystem {
    fn estimate(&self, trajectory: &LatentTrajectory) -> Settings {
        let z = &trajectory.initial().0;
        let c = &self.constants.estimator_matrix;
        let mut y = [0.0; LATENT_DIM];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = c[i].iter().zip(z).map(|(a, b)| a * b).sum();
        }
        Settings::clipped(y)
    }
}

impl Classifier for SyntheticSystem {
    fn classify(&self, state: &BeamState) -> ClassLabel {
        let (module, dist) = self.nearest_prototype(state);
        if dist <= self.constants.classifier.threshold {
            ClassLabel::Module(module + 1)
        } else {
            ClassLabel::NonPhysical
        }
    }
}

/// `z_{t+1} = tanh(A z_t + b)` for 47 steps.
pub(crate) fn rollout(
    a: &[[f64; LATENT_DIM]; LATENT_DIM],
    b: &[f64; LATENT_DIM],
    z1: &LatentPoint,
) -> LatentTrajectory {
    let mut points = Vec::with_capacity(MODULES);
    points.push(*z1);
    let mut z = z1.0;
    for _ in 1..MODULES {
        let mut next = [0.0; LATENT_DIM];
        for (i, n) in next.iter_mut().enumerate() {
            let s: f64 = a[i].iter().zip(&z).map(|(x, y)| x * y).sum();
            *n = (s + b[i]).tanh();
        }
        z = next;
        points.push(LatentPoint(z));
    }
    LatentTrajectory::new(points).expect("rollout produces MODULES points")
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Gaussian over pixel centres `0..GRID`, normalised to unit sum.
fn gaussian_profile(center: f64, width: f64) -> [f64; GRID] {
    let mut g = [0.0; GRID];
    for (i, v) in g.iter_mut().enumerate() {
        let u = (i as f64 - center) / width;
        *v = (-0.5 * u * u).exp();
    }
    let total: f64 = g.iter().sum();
    for v in g.iter_mut() {
        *v /= total;
    }
    g
}

/// Per-projection moment features of a beam state.
///
/// An empty projection maps to zero intensity, the grid centre and zero
/// spread.
pub fn beam_features(state: &BeamState, intensity_scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(PROJECTIONS * FEATURES_PER_PROJECTION);
    let mid = (GRID as f64 - 1.0) / 2.0;
    for img in &state.projections {
        let mut total = 0.0;
        let (mut mx, mut my) = (0.0, 0.0);
        for i in 0..GRID {
            for j in 0..GRID {
                let v = img[i * GRID + j];
                total += v;
                mx += v * j as f64;
                my += v * i as f64;
            }
        }
        if total <= 0.0 {
            out.extend_from_slice(&[0.0, mid, mid, 0.0, 0.0]);
            continue;
        }
        mx /= total;
        my /= total;
        let (mut vx, mut vy) = (0.0, 0.0);
        for i in 0..GRID {
            for j in 0..GRID {
                let v = img[i * GRID + j];
                vx += v * (j as f64 - mx).powi(2);
                vy += v * (i as f64 - my).powi(2);
            }
        }
        out.extend_from_slice(&[
            total / intensity_scale,
            mx,
            my,
            (vx / total).sqrt(),
            (vy / total).sqrt(),
        ]);
    }
    out
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Index and distance of the closest prototype; first wins on ties.
fn nearest(prototypes: &[Vec<f64>], f: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in prototypes.iter().enumerate() {
        let d = distance(p, f);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn sample_manifold(constants: &SyntheticConstants, rng: &mut SeededRng) -> LatentPoint {
    let m = &constants.manifold;
    let mut z = [0.0; LATENT_DIM];
    for (d, v) in z.iter_mut().enumerate() {
        *v = m.center[d] - m.radius + 2.0 * m.radius * rng.random::<f64>();
    }
    LatentPoint(z)
}

/// Builds per-module prototypes from `prototype_samples` manifold draws and
/// sets the acceptance threshold to `margin` times the largest distance seen
/// over those draws, a further `calibration_samples` draws and every vertex
/// of the manifold box.
pub(crate) fn calibrate_classifier(
    constants: &SyntheticConstants,
    rng: &mut SeededRng,
    prototype_samples: usize,
    calibration_samples: usize,
    margin: f64,
) -> Result<ClassifierConstants> {
    let mut draft = constants.clone();
    draft.classifier.prototypes.clear();
    let system = SyntheticSystem::new(draft)?;
    let scale = constants.decoder.beam_intensity;
    let features_of = |z1: &LatentPoint| -> Vec<Vec<f64>> {
        system
            .decode(&system.forecast(z1))
            .iter()
            .map(|s| beam_features(s, scale))
            .collect()
    };

    let width = PROJECTIONS * FEATURES_PER_PROJECTION;
    let mut prototypes = vec![vec![0.0; width]; MODULES];
    let mut fitted: Vec<LatentPoint> = Vec::with_capacity(prototype_samples);
    for _ in 0..prototype_samples {
        let z1 = sample_manifold(constants, rng);
        for (p, f) in prototypes.iter_mut().zip(features_of(&z1)) {
            for (acc, v) in p.iter_mut().zip(f) {
                *acc += v;
            }
        }
        fitted.push(z1);
    }
    for p in prototypes.iter_mut() {
        for v in p.iter_mut() {
            *v /= prototype_samples as f64;
        }
    }

    let m = &constants.manifold;
    let mut probes = fitted;
    probes.extend((0..calibration_samples).map(|_| sample_manifold(constants, rng)));
    for mask in 0..(1u32 << LATENT_DIM) {
        let mut z = [0.0; LATENT_DIM];
        for (d, v) in z.iter_mut().enumerate() {
            let sign = if mask & (1 << d) != 0 { 1.0 } else { -1.0 };
            *v = m.center[d] + sign * m.radius;
        }
        probes.push(LatentPoint(z));
    }

    let mut worst: f64 = 0.0;
    for z1 in &probes {
        for (mi, f) in features_of(z1).iter().enumerate() {
            let (label, d) = nearest(&prototypes, f);
            if label != mi {
                return Err(Error::Numerical(format!(
                    "manifold state of module {} is nearest to prototype {}",
                    mi + 1,
                    label + 1
                )));
            }
            worst = worst.max(d);
        }
    }

    Ok(ClassifierConstants {
        prototypes,
        threshold: margin * worst,
        prototype_samples,
    })
}
