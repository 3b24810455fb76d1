//! Gaussian-process regression over the latent search space.
//!
//! Squared-exponential kernel with one length scale per input dimension.
//! Targets are centred on their mean before solving and the mean is added
//! back at prediction time. The kernel matrix is factorised with a Cholesky
//! decomposition; if that fails, diagonal jitter is escalated from `1e-10`
//! by factors of ten up to `1e-4`.
//!
//! Models are immutable: [`GpModel::update`] refits on the augmented data and
//! returns a new model.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::system::BoundsBox;

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-4;

/// Fraction of the box width used as the heuristic length scale.
pub const LENGTH_SCALE_FRACTION: f64 = 0.25;
pub const HEURISTIC_NOISE: f64 = 1e-8;
pub const MIN_SIGNAL_VARIANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelParams {
    pub signal_variance: f64,
    pub length_scales: Vec<f64>,
    pub noise_variance: f64,
}

impl KernelParams {
    pub fn new(signal_variance: f64, length_scales: Vec<f64>, noise_variance: f64) -> Result<Self> {
        let p = Self {
            signal_variance,
            length_scales,
            noise_variance,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit signal variance, unit length scales, given noise.
    pub fn unit(dim: usize, noise_variance: f64) -> Self {
        Self {
            signal_variance: 1.0,
            length_scales: vec![1.0; dim],
            noise_variance,
        }
    }

    /// Fixed heuristic used by the tuner: length scales a quarter of the box
    /// width, signal variance the (population) variance of the targets with a
    /// floor, near-zero noise.
    pub fn heuristic(bounds: &BoundsBox, targets: &[f64]) -> Self {
        let n = targets.len().max(1) as f64;
        let mean = targets.iter().sum::<f64>() / n;
        let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
        Self {
            signal_variance: var.max(MIN_SIGNAL_VARIANCE),
            length_scales: (0..bounds.dim())
                .map(|d| LENGTH_SCALE_FRACTION * bounds.width(d))
                .collect(),
            noise_variance: HEURISTIC_NOISE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_variance > 0.0 && self.signal_variance.is_finite()) {
            return Err(Error::invalid(
                "signal_variance must be positive and finite",
            ));
        }
        if self.length_scales.is_empty()
            || self
                .length_scales
                .iter()
                .any(|l| !(*l > 0.0 && l.is_finite()))
        {
            return Err(Error::invalid("length scales must be positive and finite"));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::invalid(
                "noise_variance must be non-negative and finite",
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.length_scales.len()
    }

    #[inline]
    fn eval_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut r2 = 0.0;
        for ((x, y), l) in a.iter().zip(b).zip(&self.length_scales) {
            let u = (x - y) / l;
            r2 += u * u;
        }
        self.signal_variance * (-0.5 * r2).exp()
    }
}

/// `signal_variance * exp(-0.5 * sum_d ((a_d - b_d) / l_d)^2)`.
pub fn kernel_eval(a: &[f64], b: &[f64], params: &KernelParams) -> Result<f64> {
    params.validate()?;
    check_point(a, params.dim())?;
    check_point(b, params.dim())?;
    Ok(params.eval_unchecked(a, b))
}

fn check_point(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::invalid(format!(
            "point has dimension {}, kernel expects {dim}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("point has non-finite entries"));
    }
    Ok(())
}

/// Noise-free interpolation cannot honour two targets at one input.
fn reject_conflicting_duplicates(inputs: &[Vec<f64>], targets: &[f64]) -> Result<()> {
    for i in 0..inputs.len() {
        for j in (i + 1)..inputs.len() {
            if inputs[i] == inputs[j] && targets[i] != targets[j] {
                return Err(Error::Numerical(format!(
                    "inputs {i} and {j} coincide with different targets ({} vs {}) and the \
                     noise variance is zero; the kernel system is singular",
                    targets[i], targets[j]
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct GpModel {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    params: KernelParams,
    /// Lower Cholesky factor of `K + (noise + jitter) I`.
    factor: DMatrix<f64>,
    alpha: DVector<f64>,
    target_mean: f64,
    jitter: f64,
}

impl GpModel {
    pub fn fit(inputs: &[Vec<f64>], targets: &[f64], params: KernelParams) -> Result<Self> {
        params.validate()?;
        if inputs.is_empty() || inputs.len() != targets.len() {
            return Err(Error::invalid(format!(
                "need equal, non-zero numbers of inputs and targets (got {} and {})",
                inputs.len(),
                targets.len()
            )));
        }
        for x in inputs {
            check_point(x, params.dim())?;
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("targets must be finite"));
        }

        if params.noise_variance == 0.0 {
            reject_conflicting_duplicates(inputs, targets)?;
        }

        let n = inputs.len();
        let kernel = DMatrix::from_fn(n, n, |i, j| params.eval_unchecked(&inputs[i], &inputs[j]));
        let target_mean = targets.iter().sum::<f64>() / n as f64;
        let centred = DVector::from_iterator(n, targets.iter().map(|t| t - target_mean));

        let mut jitter = JITTER_START;
        let chol = loop {
            let mut k = kernel.clone();
            for i in 0..n {
                k[(i, i)] += params.noise_variance + jitter;
            }
            if let Some(c) = Cholesky::new(k) {
                break c;
            }
            jitter *= 10.0;
            // 1e-10 * 10^6 lands slightly above 1e-4 in floating point
            if jitter > JITTER_MAX * (1.0 + 1e-9) {
                return Err(Error::Numerical(format!(
                    "kernel matrix of {n} points is not positive definite even with jitter \
                     {JITTER_MAX:e} (noise {}); inputs are likely duplicated with conflicting \
                     targets or the length scales are too long",
                    params.noise_variance
                )));
            }
        };
        let alpha = chol.solve(&centred);
        Ok(Self {
            inputs: inputs.to_vec(),
            targets: targets.to_vec(),
            params,
            factor: chol.unpack(),
            alpha,
            target_mean,
            jitter,
        })
    }

    /// Posterior `(mean, variance)` at `query`.
    pub fn posterior(&self, query: &[f64]) -> Result<(f64, f64)> {
        check_point(query, self.params.dim())?;
        Ok(self.posterior_unchecked(query))
    }

    pub(crate) fn posterior_unchecked(&self, query: &[f64]) -> (f64, f64) {
        let n = self.inputs.len();
        let mut k = DVector::from_iterator(
            n,
            self.inputs
                .iter()
                .map(|x| self.params.eval_unchecked(x, query)),
        );
        let mean = self.target_mean + k.dot(&self.alpha);
        self.factor.solve_lower_triangular_mut(&mut k);
        let raw = self.params.signal_variance - k.norm_squared();
        debug_assert!(
            raw > -1e-10 * self.params.signal_variance.max(1.0),
            "posterior variance {raw} is negative beyond roundoff"
        );
        (mean, raw.max(0.0))
    }

    /// Refit on the data plus `(point, value)`, keeping the kernel parameters.
    pub fn update(&self, point: &[f64], value: f64) -> Result<Self> {
        self.update_with(point, value, self.params.clone())
    }

    /// Refit on the data plus `(point, value)` with new kernel parameters.
    pub fn update_with(&self, point: &[f64], value: f64, params: KernelParams) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("update value must be finite"));
        }
        let mut inputs = self.inputs.clone();
        inputs.push(point.to_vec());
        let mut targets = self.targets.clone();
        targets.push(value);
        Self::fit(&inputs, &targets, params)
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    /// Diagonal jitter that made the factorisation succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Largest observed target (the incumbent of a maximisation).
    pub fn best_target(&self) -> f64 {
        self.targets
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p8(noise: f64) -> KernelParams {
        KernelParams::unit(8, noise)
    }

    #[test]
    fn kernel_at_zero_distance_is_signal_variance() {
        let mut p = p8(0.0);
        p.signal_variance = 2.5;
        let z = [0.3; 8];
        assert_eq!(kernel_eval(&z, &z, &p).unwrap(), 2.5);
        assert_eq!(kernel_eval(&[0.0; 8], &[0.0; 8], &p8(0.0)).unwrap(), 1.0);
    }

    #[test]
    fn kernel_unit_offset() {
        let mut a = [0.0; 8];
        a[0] = 1.0;
        let k = kernel_eval(&a, &[0.0; 8], &p8(0.0)).unwrap();
        assert!((k - 0.6065306597126334).abs() < 1e-15);
    }

    #[test]
    fn kernel_rejects_bad_input() {
        let mut a = [0.0; 8];
        a[2] = f64::INFINITY;
        assert!(matches!(
            kernel_eval(&a, &[0.0; 8], &p8(0.0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(kernel_eval(&[0.0; 3], &[0.0; 8], &p8(0.0)).is_err());
        assert!(KernelParams::new(0.0, vec![1.0], 0.0).is_err());
        assert!(KernelParams::new(1.0, vec![1.0, -1.0], 0.0).is_err());
        assert!(KernelParams::new(1.0, vec![1.0], -1e-9).is_err());
    }

    #[test]
    fn single_point_interpolates() {
        let m = GpModel::fit(&[vec![0.0; 8]], &[2.0], p8(1e-8)).unwrap();
        let (mean, var) = m.posterior(&[0.0; 8]).unwrap();
        assert!((mean - 2.0).abs() < 1e-6);
        assert!(var <= 1e-6);
    }

    #[test]
    fn consistent_duplicates_fit() {
        let x = vec![vec![0.1; 8], vec![0.1; 8], vec![0.5; 8]];
        let m = GpModel::fit(&x, &[1.0, 1.0, 3.0], p8(1e-6)).unwrap();
        let (mean, _) = m.posterior(&[0.1; 8]).unwrap();
        assert!((mean - 1.0).abs() < 1e-4);
    }

    #[test]
    fn conflicting_duplicates_without_noise_fail() {
        let x = vec![vec![0.2; 8], vec![0.2; 8]];
        assert!(matches!(
            GpModel::fit(&x, &[1.0, -1.0], p8(0.0)),
            Err(Error::Numerical(_))
        ));
        // with a little noise the same data is a valid regression problem
        let m = GpModel::fit(&x, &[1.0, -1.0], p8(1e-6)).unwrap();
        let (mean, _) = m.posterior(&[0.2; 8]).unwrap();
        assert!(mean.abs() < 1e-6);
    }

    #[test]
    fn consistent_duplicates_without_noise_use_jitter() {
        let x = vec![vec![0.2; 8], vec![0.2; 8]];
        let m = GpModel::fit(&x, &[1.0, 1.0], p8(0.0)).unwrap();
        assert!(m.jitter() > 0.0);
    }

    #[test]
    fn factorisation_failure_is_numerical_error() {
        // A huge signal variance swamps even the largest jitter.
        let x = vec![vec![0.0; 2], vec![0.0, 0.0]];
        let p = KernelParams::new(1e20, vec![1.0, 1.0], 0.0).unwrap();
        assert!(matches!(
            GpModel::fit(&x, &[1.0, 1.0], p),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn fit_rejects_mismatched_data() {
        assert!(GpModel::fit(&[], &[], p8(0.0)).is_err());
        assert!(GpModel::fit(&[vec![0.0; 8]], &[1.0, 2.0], p8(0.0)).is_err());
        assert!(GpModel::fit(&[vec![0.0; 8]], &[f64::NAN], p8(0.0)).is_err());
    }

    #[test]
    fn prior_reversion_far_from_data() {
        let x = vec![vec![0.0; 8], vec![0.2; 8]];
        let m = GpModel::fit(&x, &[1.0, 3.0], p8(1e-8)).unwrap();
        let (mean, var) = m.posterior(&[20.0; 8]).unwrap();
        assert!((var - 1.0).abs() < 1e-6);
        assert!((mean - 2.0).abs() < 1e-6);
    }

    #[test]
    fn update_leaves_original_untouched() {
        let m = GpModel::fit(&[vec![0.0; 8]], &[1.0], p8(1e-8)).unwrap();
        let u = m.update(&[0.5; 8], 4.0).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(u.len(), 2);
        let (mean, _) = u.posterior(&[0.5; 8]).unwrap();
        assert!((mean - 4.0).abs() < 1e-6);
        assert!(m.update(&[0.5; 8], f64::NAN).is_err());
    }

    #[test]
    fn heuristic_params() {
        let b = BoundsBox::unit_latent();
        let p = KernelParams::heuristic(&b, &[1.0, 1.0]);
        assert_eq!(p.signal_variance, MIN_SIGNAL_VARIANCE);
        assert!(p.length_scales.iter().all(|l| *l == 0.5));
        let p = KernelParams::heuristic(&b, &[0.0, 2.0]);
        assert_eq!(p.signal_variance, 1.0);
    }
}
