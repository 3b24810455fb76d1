use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LATENT_DIM: usize = 8;
pub const MODULES: usize = 48;
pub const PROJECTIONS: usize = 15;
/// 1-based index of the energy-phase projection used for beam loss.
pub const LOSS_PROJECTION: usize = 11;
/// Side length of every projection image.
pub const GRID: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentPoint(pub [f64; LATENT_DIM]);

impl LatentPoint {
    pub fn new(values: [f64; LATENT_DIM]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("latent point has non-finite entries"));
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; LATENT_DIM] = values.try_into().map_err(|_| {
            Error::invalid(format!(
                "latent point needs {LATENT_DIM} values, got {}",
                values.len()
            ))
        })?;
        Self::new(arr)
    }

    pub fn zeros() -> Self {
        Self([0.0; LATENT_DIM])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `z_{1:48}`; index `m - 1` holds the latent of module `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatentPoint>", into = "Vec<LatentPoint>")]
pub struct LatentTrajectory {
    points: Vec<LatentPoint>,
}

impl LatentTrajectory {
    pub fn new(points: Vec<LatentPoint>) -> Result<Self> {
        if points.len() != MODULES {
            return Err(Error::invalid(format!(
                "trajectory needs {MODULES} points, got {}",
                points.len()
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[LatentPoint] {
        &self.points
    }

    pub fn initial(&self) -> &LatentPoint {
        &self.points[0]
    }

    /// Latent of module `m` (1-based).
    pub fn module(&self, m: usize) -> &LatentPoint {
        &self.points[m - 1]
    }
}

impl TryFrom<Vec<LatentPoint>> for LatentTrajectory {
    type Error = Error;

    fn try_from(points: Vec<LatentPoint>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<LatentTrajectory> for Vec<LatentPoint> {
    fn from(t: LatentTrajectory) -> Self {
        t.points
    }
}

/// Decoded beam at one module: 15 row-major `GRID x GRID` intensity images.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamState {
    pub module: usize,
    pub projections: Vec<Vec<f64>>,
}

impl BeamState {
    pub fn new(module: usize, projections: Vec<Vec<f64>>) -> Result<Self> {
        if !(1..=MODULES).contains(&module) {
            return Err(Error::invalid(format!(
                "module {module} out of 1..={MODULES}"
            )));
        }
        if projections.len() != PROJECTIONS || projections.iter().any(|p| p.len() != GRID * GRID) {
            return Err(Error::invalid(
                "beam state needs 15 projections of 32x32 pixels",
            ));
        }
        if projections
            .iter()
            .flatten()
            .any(|v| !(0.0..=1.0).contains(v))
        {
            return Err(Error::invalid("pixel intensities must lie in [0, 1]"));
        }
        Ok(Self {
            module,
            projections,
        })
    }

    pub fn empty(module: usize) -> Self {
        Self {
            module,
            projections: vec![vec![0.0; GRID * GRID]; PROJECTIONS],
        }
    }

    /// Projection `k` (1-based).
    pub fn projection(&self, k: usize) -> &[f64] {
        &self.projections[k - 1]
    }

    pub fn loss_projection(&self) -> &[f64] {
        self.projection(LOSS_PROJECTION)
    }
}

/// Normalised RF settings, each in `[-0.5, 0.5]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Settings(pub [f64; LATENT_DIM]);

impl Settings {
    pub const LIMIT: f64 = 0.5;

    pub fn clipped(raw: [f64; LATENT_DIM]) -> Self {
        Self(raw.map(|v| v.clamp(-Self::LIMIT, Self::LIMIT)))
    }
}

/// Axis-aligned search box `[lower, upper]`.
///
/// The dimension is not fixed to the latent dimension so the surrogate and
/// acquisition code can be exercised on low-dimensional problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundsBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self { lower, upper };
        b.validate()?;
        Ok(b)
    }

    /// The default latent box `[-1, 1]^8`.
    pub fn unit_latent() -> Self {
        Self {
            lower: vec![-1.0; LATENT_DIM],
            upper: vec![1.0; LATENT_DIM],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::invalid(
                "bounds must be non-empty and of equal length",
            ));
        }
        for (d, (a, b)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::invalid(format!(
                    "bounds dimension {d}: need finite lower < upper, got [{a}, {b}]"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (v, (a, b)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*a, *b);
        }
    }

    /// Maps `u` in `[0, 1)` componentwise onto the box.
    pub fn scale(&self, d: usize, u: f64) -> f64 {
        (self.lower[d] + u * self.width(d)).clamp(self.lower[d], self.upper[d])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassLabel {
    Module(usize),
    NonPhysical,
}
