//! Seeded simulation estimators that independently validate the analytic
//! formulas.
//!
//! Every estimator partitions its trials over a fixed number of worker
//! substreams derived from `(seed, worker index)` and merges the counts in
//! worker order, so the result is a pure function of `(arguments, seed)` and
//! would stay bit-identical if the chunks were evaluated in parallel.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quantizer::{quantize_scalar, MAX_BITS};
use crate::rng::{substream, STREAM_MC_WORKER};

/// Fixed trial partition count; part of the reproducibility contract.
pub const WORKER_SUBSTREAMS: u64 = 8;

/// A Bernoulli Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Fraction of successful trials.
    pub mean: f64,
    /// Binomial standard error `sqrt(mean (1 - mean) / trials)`.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Successes of worker `w` out of `n_w` trials; the partition assigns
/// `trials / WORKER_SUBSTREAMS` to each worker plus one extra to the first
/// `trials % WORKER_SUBSTREAMS` of them.
pub(crate) fn worker_successes<F>(seed: u64, trials: u64, worker: u64, mut trial: F) -> u64
where
    F: FnMut(&mut ChaCha12Rng) -> bool,
{
    let base = trials / WORKER_SUBSTREAMS;
    let extra = trials % WORKER_SUBSTREAMS;
    let n = base + if worker < extra { 1 } else { 0 };
    let mut rng = substream(seed, STREAM_MC_WORKER + worker);
    let mut successes = 0u64;
    for _ in 0..n {
        if trial(&mut rng) {
            successes += 1;
        }
    }
    successes
}

fn bernoulli<F>(seed: u64, trials: u64, mut trial: F) -> McEstimate
where
    F: FnMut(&mut ChaCha12Rng) -> bool,
{
    let mut successes = 0u64;
    for w in 0..WORKER_SUBSTREAMS {
        successes += worker_successes(seed, trials, w, &mut trial);
    }
    let mean = successes as f64 / trials as f64;
    McEstimate {
        mean,
        stderr: (mean * (1.0 - mean) / trials as f64).sqrt(),
        trials,
        seed,
    }
}

fn check_common(sigma: f64, delta: f64, dim: usize, trials: u64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::parameter("sigma must be positive and finite"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::parameter("delta must be positive and finite"));
    }
    if dim == 0 {
        return Err(Error::parameter("dimension must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::parameter("trial count must be at least 1"));
    }
    Ok(())
}

fn draw_gaussian(rng: &mut ChaCha12Rng, dim: usize, sigma: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            sigma * z
        })
        .collect()
}

/// Fraction of independently drawn `(phi, w)` pairs under which a fixed pair
/// of signals at distance `d` quantizes consistently on one measurement.
///
/// By rotation invariance of the Gaussian ensemble, the pair is placed at
/// `x = 0`, `x' = d e_1` without loss of generality; the full `dim`-vector
/// `phi` is still drawn so the estimator consumes randomness exactly like the
/// acquisition pipeline.
pub fn estimate_consistency(
    d: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
    bits: u32,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_common(sigma, delta, dim, trials)?;
    if !d.is_finite() || d < 0.0 {
        return Err(Error::domain(format!("distance must be >= 0, got {d}")));
    }
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::parameter(format!("bit depth must be in 1..={MAX_BITS}")));
    }
    Ok(bernoulli(seed, trials, |rng| {
        let phi = draw_gaussian(rng, dim, sigma);
        let w = rng.random::<f64>() * delta;
        let q = quantize_scalar(w / delta, bits).expect("finite");
        let q2 = quantize_scalar((d * phi[0] + w) / delta, bits).expect("finite");
        q == q2
    }))
}

/// Fraction of fresh `measurements`-row ensembles under which a fixed pair at
/// distance `d` produces fully consistent codes; the empirical counterpart of
/// `consistency_probability(d)^measurements`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_vector_consistency(
    d: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
    bits: u32,
    measurements: usize,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_common(sigma, delta, dim, trials)?;
    if !d.is_finite() || d < 0.0 {
        return Err(Error::domain(format!("distance must be >= 0, got {d}")));
    }
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::parameter(format!("bit depth must be in 1..={MAX_BITS}")));
    }
    if measurements == 0 {
        return Err(Error::parameter("measurement count must be at least 1"));
    }
    Ok(bernoulli(seed, trials, |rng| {
        for _ in 0..measurements {
            let phi = draw_gaussian(rng, dim, sigma);
            let w = rng.random::<f64>() * delta;
            let q = quantize_scalar(w / delta, bits).expect("finite");
            let q2 = quantize_scalar((d * phi[0] + w) / delta, bits).expect("finite");
            if q != q2 {
                return false;
            }
        }
        true
    }))
}

/// Fraction of Gaussian vectors with norm at least `threshold`.
pub fn estimate_norm_tail(
    dim: usize,
    sigma: f64,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_common(sigma, 1.0, dim, trials)?;
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::domain("norm threshold must be >= 0"));
    }
    Ok(bernoulli(seed, trials, |rng| {
        let phi = draw_gaussian(rng, dim, sigma);
        let norm2: f64 = phi.iter().map(|v| v * v).sum();
        norm2.sqrt() >= threshold
    }))
}

/// Fraction of measurements for which inconsistency of two radius-`radius`
/// balls at center distance `d` cannot be certified.
///
/// Per trial the certificate fails when the measurement vector's norm reaches
/// `cap`, or when either ball projection (taken with the worst-case half-width
/// `cap * radius`) straddles a quantization threshold, or when the two
/// projections land in cells with equal quantization values. The analytic
/// upper bound on this fraction is [`crate::analytics::ball_failure_bound`].
#[allow(clippy::too_many_arguments)]
pub fn estimate_ball_failure(
    d: f64,
    radius: f64,
    cap: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_common(sigma, delta, dim, trials)?;
    if !d.is_finite() || d < 0.0 {
        return Err(Error::domain(format!("distance must be >= 0, got {d}")));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::parameter("ball radius must be >= 0"));
    }
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Error::parameter("norm cap must be positive"));
    }
    if 2.0 * cap * radius >= delta {
        return Err(Error::parameter(format!(
            "need 2 * cap * radius < delta, got {} >= {delta}",
            2.0 * cap * radius
        )));
    }
    let half_width = cap * radius;
    Ok(bernoulli(seed, trials, |rng| {
        let phi = draw_gaussian(rng, dim, sigma);
        let w = rng.random::<f64>() * delta;
        let norm2: f64 = phi.iter().map(|v| v * v).sum();
        if norm2.sqrt() >= cap {
            return true;
        }
        let center_a = w;
        let center_b = d * phi[0] + w;
        // Cell index of a point y is ceil(y / delta); an interval is certified
        // inside one cell when both ends share that index, and the two balls
        // are certifiably inconsistent when their cells differ in parity.
        let lo_a = ((center_a - half_width) / delta).ceil();
        let hi_a = ((center_a + half_width) / delta).ceil();
        if lo_a != hi_a {
            return true;
        }
        let lo_b = ((center_b - half_width) / delta).ceil();
        let hi_b = ((center_b + half_width) / delta).ceil();
        if lo_b != hi_b {
            return true;
        }
        (hi_a - hi_b).rem_euclid(2.0) == 0.0
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{
        ball_failure_bound, consistency_probability, consistency_probability_multibit, norm_tail,
    };

    #[test]
    fn zero_distance_is_always_consistent() {
        let est = estimate_consistency(0.0, 1.0, 1.0, 4, 1, 20_000, 1).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let a = estimate_consistency(0.5, 1.0, 1.0, 4, 1, 50_000, 9).unwrap();
        let b = estimate_consistency(0.5, 1.0, 1.0, 4, 1, 50_000, 9).unwrap();
        assert_eq!(a, b);
        let c = estimate_consistency(0.5, 1.0, 1.0, 4, 1, 50_000, 10).unwrap();
        assert_ne!(a.mean, c.mean);
        // Disjoint seeds agree within Monte Carlo error (two-sample z test at
        // the 1e-3 level: |z| <= 3.29).
        let z = (a.mean - c.mean) / (a.stderr.powi(2) + c.stderr.powi(2)).sqrt();
        assert!(z.abs() <= 3.29, "z = {z}");
    }

    #[test]
    fn partition_merge_matches_sequential() {
        // Running the fixed partition chunk by chunk (any order) and merging
        // reproduces the estimator output.
        let trials = 10_001u64;
        let trial = |rng: &mut ChaCha12Rng| rng.random::<f64>() < 0.3;
        let est = bernoulli(77, trials, trial);
        let mut successes = 0u64;
        for w in (0..WORKER_SUBSTREAMS).rev() {
            successes += worker_successes(77, trials, w, trial);
        }
        assert_eq!(est.mean, successes as f64 / trials as f64);
    }

    #[test]
    fn consistency_matches_series() {
        let d = 0.5;
        let est = estimate_consistency(d, 1.0, 1.0, 8, 1, 200_000, 1234).unwrap();
        let exact = consistency_probability(d, 1.0, 1.0).unwrap();
        assert!(
            (est.mean - exact).abs() <= 4.0 * est.stderr,
            "mc {} vs series {exact} (stderr {})",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn multibit_consistency_matches_law() {
        for &d in &[0.4, 1.5, 3.0] {
            let est = estimate_consistency(d, 1.0, 1.0, 4, 3, 150_000, 777).unwrap();
            let exact = consistency_probability_multibit(d, 1.0, 1.0, 3).unwrap();
            assert!(
                (est.mean - exact).abs() <= 4.0 * est.stderr,
                "mc {} vs law {exact} at d={d}",
                est.mean
            );
        }
    }

    #[test]
    fn vector_consistency_matches_power_law() {
        let (d, m) = (0.3, 5usize);
        let est = estimate_vector_consistency(d, 1.0, 1.0, 4, 1, m, 150_000, 99).unwrap();
        let p = consistency_probability(d, 1.0, 1.0).unwrap();
        let expected = p.powi(m as i32);
        assert!(
            (est.mean - expected).abs() <= 4.0 * est.stderr,
            "mc {} vs p^m {expected}",
            est.mean
        );
    }

    #[test]
    fn norm_tail_edges_and_agreement() {
        let all = estimate_norm_tail(3, 1.0, 0.0, 10_000, 5).unwrap();
        assert_eq!(all.mean, 1.0);
        let est = estimate_norm_tail(2, 1.0, 2.0, 200_000, 6).unwrap();
        let exact = (-2.0f64).exp();
        assert!(
            (est.mean - exact).abs() <= 4.0 * est.stderr,
            "mc {} vs exp(-2) {exact}",
            est.mean
        );
        let est = estimate_norm_tail(10, 1.0, 4.0, 200_000, 7).unwrap();
        let exact = norm_tail(10, 1.0, 4.0).unwrap();
        assert!((est.mean - exact).abs() <= 4.0 * est.stderr);
    }

    #[test]
    fn ball_failure_at_zero_distance_is_certain() {
        let est = estimate_ball_failure(0.0, 0.01, 2.0, 1.0, 1.0, 4, 20_000, 3).unwrap();
        assert_eq!(est.mean, 1.0);
    }

    #[test]
    fn ball_failure_dominated_by_bound() {
        let k = 8usize;
        let sigma = 1.0 / (k as f64).sqrt();
        let configs = [
            (1.0, 0.02, 2.0, 0.35),
            (0.5, 0.01, 2.0, 0.25),
            (2.0, 0.03, 2.0, 0.5),
        ];
        for &(d, radius, cap, delta) in &configs {
            let est =
                estimate_ball_failure(d, radius, cap, sigma, delta, k, 100_000, 2024).unwrap();
            let bound = ball_failure_bound(d, radius, cap, sigma, delta, k).unwrap();
            assert!(
                est.mean <= bound + 4.0 * est.stderr,
                "mc {} above bound {bound} at d={d}",
                est.mean
            );
        }
    }

    #[test]
    fn ball_failure_zero_radius_reduces_to_consistency_plus_tail() {
        // With radius 0 the failure event is exactly {consistent} union
        // {norm >= cap}; its probability is within the union-bound slack of
        // the analytic sum.
        let (d, cap, k) = (0.8, 2.5, 4usize);
        let est = estimate_ball_failure(d, 0.0, cap, 1.0, 1.0, k, 200_000, 11).unwrap();
        let bound = ball_failure_bound(d, 0.0, cap, 1.0, 1.0, k).unwrap();
        assert!(est.mean <= bound + 4.0 * est.stderr);
        // The overlap of the two events is at most the tail probability.
        let tail = norm_tail(k, 1.0, cap).unwrap();
        assert!(est.mean >= bound - tail - 4.0 * est.stderr);
    }

    #[test]
    fn pair_placement_matches_random_rotation() {
        // The estimator pins the pair at (0, d e_1); acquiring a rotated pair
        // through the full pipeline must give the same probability.
        let (d, sigma, delta, k) = (0.6, 1.0, 1.0, 3usize);
        let est = estimate_consistency(d, sigma, delta, k, 1, 120_000, 42).unwrap();
        // Rotated pair: x = c, x' = c + d u for a random center and direction.
        let mut rng = crate::rng::substream(4242, 0x9999);
        let x = crate::model::SignalModel::unit_ball(k).unwrap().sample(&mut rng).unwrap();
        let mut dir: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in dir.iter_mut() {
            *v *= d / norm;
        }
        let x2: Vec<f64> =
            x.values().iter().zip(&dir).map(|(a, b)| a + b).collect();
        let rotated = bernoulli(4242, 120_000, |rng| {
            let phi = draw_gaussian(rng, k, sigma);
            let w = rng.random::<f64>() * delta;
            let y1: f64 = x.values().iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>() + w;
            let y2: f64 = x2.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>() + w;
            quantize_scalar(y1 / delta, 1).unwrap() == quantize_scalar(y2 / delta, 1).unwrap()
        });
        let z = (est.mean - rotated.mean)
            / (est.stderr.powi(2) + rotated.stderr.powi(2)).sqrt();
        assert!(z.abs() <= 3.29, "rotation z = {z}");
    }
}
