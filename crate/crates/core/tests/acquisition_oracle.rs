//! Expected improvement against quadrature, Monte-Carlo and dense-grid
//! oracles.

use cbol_core::acquisition::{std_normal_cdf, std_normal_pdf};
use cbol_core::gp::{GpModel, KernelParams};
use cbol_core::rng::seeded;
use cbol_core::{expected_improvement, propose_next, AcquisitionConfig, BoundsBox};
use rand::Rng;
use rand_distr::StandardNormal;

/// Composite Simpson integral of the density from -12 to `x`.
fn simpson_cdf(x: f64) -> f64 {
    let lo = -12.0;
    if x <= lo {
        return 0.0;
    }
    let n = 20_000;
    let h = (x - lo) / n as f64;
    let mut s = std_normal_pdf(lo) + std_normal_pdf(x);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * std_normal_pdf(lo + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn cdf_matches_quadrature() {
    for i in 0..=80 {
        let x = -8.0 + 0.2 * i as f64;
        let (a, b) = (std_normal_cdf(x), simpson_cdf(x));
        assert!((a - b).abs() < 1e-12, "x = {x}: {a} vs {b}");
    }
}

#[test]
fn ei_matches_monte_carlo() {
    let mut rng = seeded(2024);
    let samples = 200_000;
    for _ in 0..20 {
        let mean = rng.random::<f64>() * 4.0 - 2.0;
        let std = 0.05 + rng.random::<f64>() * 1.5;
        let xi = rng.random::<f64>() * 0.3;
        // standardised gap within +-2.5 so enough samples land in the tail
        let t = rng.random::<f64>() * 5.0 - 2.5;
        let best = mean - xi - t * std;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..samples {
            let z: f64 = rng.sample(StandardNormal);
            let g = (mean + std * z - best - xi).max(0.0);
            sum += g;
            sq += g * g;
        }
        let m = sum / samples as f64;
        let se = ((sq / samples as f64 - m * m) / samples as f64).sqrt();
        let ei = expected_improvement(mean, std, best, xi).unwrap();
        assert!((ei - m).abs() <= 3.0 * se + 1e-12, "{ei} vs {m} +- {se}");
    }
}

#[test]
fn ei_closed_form_values() {
    // gap 1, std 1: Phi(1) + phi(1)
    let v = expected_improvement(1.0, 1.0, 0.0, 0.0).unwrap();
    assert!((v - (0.841_344_746_068_542_9 + 0.241_970_724_519_143_37)).abs() < 1e-12);
    // gap -1, std 2: -Phi(-0.5) + 2 phi(0.5)
    let v = expected_improvement(0.0, 2.0, 0.5, 0.5).unwrap();
    assert!((v - (-0.308_537_538_725_986_9 + 2.0 * 0.352_065_326_764_299_5)).abs() < 1e-12);
}

#[test]
fn proposal_beats_dense_grid_in_one_dimension() {
    let model = GpModel::fit(
        &[vec![0.2], vec![0.7]],
        &[0.3, 1.0],
        KernelParams::new(0.5, vec![0.15], 1e-8).unwrap(),
    )
    .unwrap();
    let bounds = BoundsBox::new(vec![0.0], vec![1.0]).unwrap();
    let ei = |x: f64| {
        let (m, v) = model.posterior(&[x]).unwrap();
        expected_improvement(m, v.sqrt(), model.best_target(), 0.01).unwrap()
    };
    let grid_max = (0..100_000)
        .map(|i| ei(i as f64 / 99_999.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let cfg = AcquisitionConfig {
        xi: 0.01,
        candidate_count: 4096,
        refine_steps: 64,
    };
    for seed in 0..5 {
        let x = propose_next(&model, &bounds, &cfg, &mut seeded(seed)).unwrap();
        assert!(ei(x[0]) >= grid_max - 1e-4, "{} vs {grid_max}", ei(x[0]));
    }
}
