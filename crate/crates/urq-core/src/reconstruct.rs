//! Desk-scale consistent reconstruction and the error-decay experiment.
//!
//! No practical decoder is provided; reconstruction is realized as a brute
//! force search over an explicit candidate set, which is enough to exhibit
//! the decay guarantees at small dimension (grids are affordable up to about
//! three dimensions).

use rand::Rng;

use crate::analytics::{guaranteed_distance, GuaranteeConstants};
use crate::ensemble::MeasurementEnsemble;
use crate::error::{Error, Result};
use crate::model::SignalModel;
use crate::quantizer::QuantizedCode;
use crate::rng::{derive_seed, substream, STREAM_CANDIDATES, STREAM_PAIR, STREAM_SHARED_ENSEMBLE};
use crate::signal::Signal;

/// How a candidate set is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateGenerator {
    /// Lattice of the given spacing intersected with the model set
    /// (unit-ball and similar-signal models only).
    Grid { spacing: f64 },
    /// `count` independent draws from the model.
    Cloud { count: usize },
}

/// A reproducible candidate set over a signal model.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub model: SignalModel,
    pub generator: CandidateGenerator,
    pub seed: u64,
}

/// Guard against accidentally requesting an astronomically large grid.
const MAX_GRID_CANDIDATES: f64 = 2.0e7;

impl CandidateSet {
    /// Enumerate the candidates. Every returned signal satisfies the model
    /// constraint.
    pub fn materialize(&self) -> Result<Vec<Signal>> {
        match &self.generator {
            CandidateGenerator::Cloud { count } => {
                if *count == 0 {
                    return Err(Error::parameter("cloud size must be at least 1"));
                }
                let mut rng = substream(self.seed, STREAM_CANDIDATES);
                (0..*count).map(|_| self.model.sample(&mut rng)).collect()
            }
            CandidateGenerator::Grid { spacing } => {
                if !(spacing.is_finite() && *spacing > 0.0) {
                    return Err(Error::parameter("grid spacing must be positive"));
                }
                let (center, radius): (Vec<f64>, f64) = match &self.model {
                    SignalModel::UnitBall { dim } => (vec![0.0; *dim], 1.0),
                    SignalModel::SimilarSignal { center, radius } => {
                        (center.values().to_vec(), *radius)
                    }
                    other => {
                        return Err(Error::Unsupported(format!(
                            "grid candidates are defined for ball-shaped models, not {other:?}"
                        )))
                    }
                };
                let dim = center.len();
                let half = (radius / spacing).floor() as i64;
                let per_axis = 2.0 * half as f64 + 1.0;
                if per_axis.powi(dim as i32) > MAX_GRID_CANDIDATES {
                    return Err(Error::parameter(format!(
                        "grid of ~{per_axis}^{dim} points is too large; increase spacing"
                    )));
                }
                let mut out = Vec::new();
                let mut index = vec![-half; dim];
                'outer: loop {
                    let offset: Vec<f64> =
                        index.iter().map(|i| *i as f64 * spacing).collect();
                    let norm2: f64 = offset.iter().map(|v| v * v).sum();
                    if norm2.sqrt() <= radius + 1e-12 {
                        let values: Vec<f64> =
                            center.iter().zip(&offset).map(|(c, o)| c + o).collect();
                        out.push(Signal::new(values)?);
                    }
                    for slot in index.iter_mut() {
                        if *slot < half {
                            *slot += 1;
                            continue 'outer;
                        }
                        *slot = -half;
                    }
                    break;
                }
                Ok(out)
            }
        }
    }
}

/// Result of a brute-force consistent search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// First candidate (lowest index) whose code equals the target, if any.
    pub best: Option<Signal>,
    /// Number of consistent candidates.
    pub consistent_count: usize,
}

/// Return a candidate that quantizes to `code` under `ensemble`, with the
/// count of all consistent candidates. Ties break to the lowest index so the
/// search is deterministic. The code may be shorter than the ensemble, in
/// which case only the leading rows constrain the search; an empty code
/// accepts every candidate.
pub fn search_consistent(
    ensemble: &MeasurementEnsemble,
    code: &QuantizedCode,
    candidates: &[Signal],
) -> Result<SearchOutcome> {
    if code.bits() != ensemble.bits() {
        return Err(Error::dimension(format!(
            "code bit depth {} does not match ensemble {}",
            code.bits(),
            ensemble.bits()
        )));
    }
    if code.len() > ensemble.rows() {
        return Err(Error::dimension(format!(
            "code length {} exceeds ensemble rows {}",
            code.len(),
            ensemble.rows()
        )));
    }
    let rows = code.len();
    let mut best = None;
    let mut consistent_count = 0usize;
    for candidate in candidates {
        if candidate.len() != ensemble.dim() {
            return Err(Error::dimension(format!(
                "candidate length {} does not match ensemble dimension {}",
                candidate.len(),
                ensemble.dim()
            )));
        }
        let q = ensemble.quantize_prefix(candidate, rows)?;
        if q.symbols() == code.symbols() {
            consistent_count += 1;
            if best.is_none() {
                best = Some(candidate.clone());
            }
        }
    }
    Ok(SearchOutcome { best, consistent_count })
}

/// Whether the pairs of a sweep share one ensemble or draw a fresh one each.
///
/// Fresh ensembles match the per-pair probability statements; a shared
/// ensemble matches the for-all-pairs event of the distance guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    FreshPerPair,
    Shared,
}

/// How the random signal pairs of a sweep are drawn from the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairSampler {
    /// Two independent draws from the model. Pair distances then follow the
    /// model's own distance distribution, which puts very little mass at
    /// small separations.
    IndependentUniform,
    /// One draw from the model plus an offset of uniformly distributed
    /// length in a uniformly distributed direction (rejected until the
    /// second endpoint lies in the model). Probes every separation scale
    /// with comparable effort. Ball-shaped models only.
    UniformDistance,
    /// Like [`PairSampler::UniformDistance`] but with log-uniformly
    /// distributed separation between `min_separation` and the model
    /// diameter: the same number of pairs lands in every factor-of-e band of
    /// separations, which is what a sampled-sup estimate of a worst distance
    /// spanning several decades needs. `min_separation` is the sampler's
    /// resolution; nothing below it is ever probed.
    LogUniformDistance { min_separation: f64 },
}

/// Configuration of a consistent-pair sweep at one measurement count.
#[derive(Debug, Clone)]
pub struct PairSweepConfig {
    pub measurements: usize,
    pub sigma: f64,
    pub delta: f64,
    pub bits: u32,
    pub model: SignalModel,
    pub pairs: usize,
    pub seed: u64,
    pub mode: EnsembleMode,
    pub sampler: PairSampler,
}

/// Largest distance two points of the model can have.
fn model_diameter(model: &SignalModel) -> f64 {
    match model {
        SignalModel::SimilarSignal { radius, .. } => 2.0 * radius,
        _ => 2.0,
    }
}

fn sample_pair(
    model: &SignalModel,
    sampler: PairSampler,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<(Signal, Signal)> {
    let draw_separation: Box<dyn Fn(&mut rand_chacha::ChaCha12Rng) -> f64> = match sampler {
        PairSampler::IndependentUniform => {
            return Ok((model.sample(rng)?, model.sample(rng)?));
        }
        PairSampler::UniformDistance => {
            let diameter = model_diameter(model);
            Box::new(move |rng| rng.random::<f64>() * diameter)
        }
        PairSampler::LogUniformDistance { min_separation } => {
            let diameter = model_diameter(model);
            if !(min_separation > 0.0 && min_separation < diameter) {
                return Err(Error::parameter(format!(
                    "min separation must lie in (0, diameter), got {min_separation}"
                )));
            }
            let span = (diameter / min_separation).ln();
            Box::new(move |rng| min_separation * (rng.random::<f64>() * span).exp())
        }
    };
    match model {
        SignalModel::UnitBall { .. } | SignalModel::SimilarSignal { .. } => {}
        other => {
            return Err(Error::Unsupported(format!(
                "distance-controlled pairs are defined for ball-shaped models, not {other:?}"
            )))
        }
    }
    let a = model.sample(rng)?;
    let dim = a.len();
    for _ in 0..10_000 {
        let r = draw_separation(rng);
        let mut dir: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                z
            })
            .collect();
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for v in dir.iter_mut() {
            *v *= r / norm;
        }
        let b = Signal::new(a.values().iter().zip(&dir).map(|(x, o)| x + o).collect())?;
        if model.contains(&b) {
            return Ok((a, b));
        }
    }
    Err(Error::parameter(
        "could not place the second endpoint inside the model",
    ))
}

/// Distances observed among consistent pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSweep {
    /// Largest distance among consistent pairs (0 when none were consistent;
    /// a sampled estimate of the worst case, so a lower estimate).
    pub worst: f64,
    /// Mean distance among consistent pairs (0 when none).
    pub mean: f64,
    /// How many sampled pairs quantized consistently.
    pub consistent_pairs: usize,
    pub pairs: usize,
}

impl PairSweep {
    pub fn any_consistent(&self) -> bool {
        self.consistent_pairs > 0
    }
}

/// Sample `pairs` independent signal pairs from the model, quantize both
/// signals of each pair, and record the distances of the pairs with equal
/// codes.
pub fn pair_sweep(config: &PairSweepConfig) -> Result<PairSweep> {
    if config.pairs == 0 {
        return Err(Error::parameter("pair count must be at least 1"));
    }
    if config.measurements == 0 {
        return Err(Error::parameter("measurement count must be at least 1"));
    }
    let dim = config.model.ambient_dim();
    let shared = match config.mode {
        EnsembleMode::Shared => {
            let seed = substream(config.seed, STREAM_SHARED_ENSEMBLE).random::<u64>();
            Some(MeasurementEnsemble::generate(
                config.measurements,
                dim,
                config.sigma,
                config.delta,
                config.bits,
                seed,
            )?)
        }
        EnsembleMode::FreshPerPair => None,
    };
    let mut worst = 0.0f64;
    let mut total = 0.0f64;
    let mut consistent_pairs = 0usize;
    for pair_index in 0..config.pairs {
        let mut rng = substream(config.seed, STREAM_PAIR + pair_index as u64);
        let (a, b) = sample_pair(&config.model, config.sampler, &mut rng)?;
        let fresh;
        let ensemble = match &shared {
            Some(e) => e,
            None => {
                let seed = rng.random::<u64>();
                fresh = MeasurementEnsemble::generate(
                    config.measurements,
                    dim,
                    config.sigma,
                    config.delta,
                    config.bits,
                    seed,
                )?;
                &fresh
            }
        };
        let qa = ensemble.quantize(&a)?;
        let qb = ensemble.quantize(&b)?;
        if qa.consistency(&qb)?.equal {
            let d = a.distance_to(&b)?;
            consistent_pairs += 1;
            total += d;
            worst = worst.max(d);
        }
    }
    let mean = if consistent_pairs > 0 { total / consistent_pairs as f64 } else { 0.0 };
    Ok(PairSweep { worst, mean, consistent_pairs, pairs: config.pairs })
}

/// Precision rule for the decay experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaRule {
    /// One fixed precision for every measurement count.
    Fixed(f64),
    /// Tie the precision to the guaranteed distance at each measurement
    /// count: `delta(m) = guaranteed_distance(m) * ratio / sqrt(dim)`.
    MatchGuarantee { ratio: f64 },
}

/// Configuration of the decay experiment.
#[derive(Debug, Clone)]
pub struct DecayConfig {
    pub model: SignalModel,
    pub m_list: Vec<usize>,
    pub pairs_per_m: usize,
    pub sigma: f64,
    pub bits: u32,
    pub seed: u64,
    pub delta_rule: DeltaRule,
    pub mode: EnsembleMode,
    pub sampler: PairSampler,
    /// Constants and failure probability used for the guarantee column.
    pub guarantee: GuaranteeConstants,
    pub guarantee_p0: f64,
    /// Rows enter the log-linear fit only with at least this many consistent
    /// pairs (so the sampled sup is meaningful) ...
    pub min_consistent_for_fit: usize,
    /// ... only while the worst distance sits above this resolution floor
    /// (zero disables the floor) ...
    pub resolution_floor: f64,
    /// ... and only once random code collisions are negligible: a row joins
    /// the fit when `pairs * 2^(-bits * m) < collision_threshold`. At small
    /// `m`, arbitrarily distant pairs collide with probability `2^(-bits m)`
    /// no matter the geometry, so the sampled sup reflects those collisions
    /// rather than the distance law.
    pub collision_threshold: f64,
}

/// One row of the decay report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub measurements: usize,
    pub delta: f64,
    pub worst: f64,
    pub mean: f64,
    pub consistent_pairs: usize,
    pub pairs: usize,
    /// Guaranteed worst-case distance at this measurement count.
    pub guarantee_distance: f64,
    /// Whether the row qualified for the log-linear fit.
    pub in_fit: bool,
}

/// Least-squares fit of `ln(worst)` against the measurement count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// The decay experiment output: rows sorted by measurement count plus the
/// fitted slope over the qualifying region. `fit` is `None` when fewer than
/// two rows qualify.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub fit: Option<LogLinearFit>,
}

/// Run the decay experiment and fit the decline of the worst consistent
/// distance.
///
/// In `FreshPerPair` mode each row is an independent sweep with fresh
/// ensembles, matching the per-pair probability statements. In `Shared` mode
/// the whole experiment uses one ensemble (sized to the largest measurement
/// count) and one sampled pair set; row `m` reads off the pairs whose codes
/// agree on the first `m` measurements. That is the for-all-pairs event of
/// the distance guarantee evaluated at every prefix length, and it makes the
/// worst-distance curve monotone by construction.
pub fn decay_experiment(config: &DecayConfig) -> Result<DecayReport> {
    if config.m_list.is_empty() {
        return Err(Error::parameter("measurement list must not be empty"));
    }
    if config.m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parameter("measurement list must be strictly increasing"));
    }
    let rows = match config.mode {
        EnsembleMode::FreshPerPair => fresh_rows(config)?,
        EnsembleMode::Shared => shared_prefix_rows(config)?,
    };
    let xs: Vec<f64> = rows
        .iter()
        .filter(|r| r.in_fit)
        .map(|r| r.measurements as f64)
        .collect();
    let ys: Vec<f64> = rows.iter().filter(|r| r.in_fit).map(|r| r.worst.ln()).collect();
    let fit = if xs.len() >= 2 {
        linear_fit(&xs, &ys).map(|(slope, intercept, r_squared)| LogLinearFit {
            slope,
            intercept,
            r_squared,
            points: xs.len(),
        })
    } else {
        None
    };
    Ok(DecayReport { rows, fit })
}

fn row_delta(config: &DecayConfig, guarantee_distance: f64) -> f64 {
    match config.delta_rule {
        DeltaRule::Fixed(d) => d,
        DeltaRule::MatchGuarantee { ratio } => {
            guarantee_distance * ratio / (config.model.ambient_dim() as f64).sqrt()
        }
    }
}

fn qualifies(config: &DecayConfig, m: usize, sweep: &PairSweep) -> bool {
    let expected_collisions =
        config.pairs_per_m as f64 * 2.0f64.powi(-((config.bits as i32) * m as i32).min(1023));
    sweep.consistent_pairs >= config.min_consistent_for_fit.max(1)
        && sweep.worst > config.resolution_floor
        && sweep.worst > 0.0
        && expected_collisions < config.collision_threshold
}

fn fresh_rows(config: &DecayConfig) -> Result<Vec<DecayRow>> {
    let dim = config.model.ambient_dim();
    let mut rows = Vec::with_capacity(config.m_list.len());
    for (row_index, &m) in config.m_list.iter().enumerate() {
        let guarantee_distance =
            guaranteed_distance(dim, m as u64, config.guarantee_p0, &config.guarantee)?;
        let delta = row_delta(config, guarantee_distance);
        let sweep = pair_sweep(&PairSweepConfig {
            measurements: m,
            sigma: config.sigma,
            delta,
            bits: config.bits,
            model: config.model.clone(),
            pairs: config.pairs_per_m,
            seed: derive_seed(config.seed, row_index as u64),
            mode: EnsembleMode::FreshPerPair,
            sampler: config.sampler,
        })?;
        rows.push(DecayRow {
            measurements: m,
            delta,
            worst: sweep.worst,
            mean: sweep.mean,
            consistent_pairs: sweep.consistent_pairs,
            pairs: sweep.pairs,
            guarantee_distance,
            in_fit: qualifies(config, m, &sweep),
        });
    }
    Ok(rows)
}

fn shared_prefix_rows(config: &DecayConfig) -> Result<Vec<DecayRow>> {
    let delta = match config.delta_rule {
        DeltaRule::Fixed(d) => d,
        DeltaRule::MatchGuarantee { .. } => {
            return Err(Error::Unsupported(
                "the shared-ensemble decay experiment needs one fixed delta".into(),
            ))
        }
    };
    let dim = config.model.ambient_dim();
    let max_m = *config.m_list.last().expect("nonempty");
    let ensemble_seed = substream(config.seed, STREAM_SHARED_ENSEMBLE).random::<u64>();
    let ensemble = MeasurementEnsemble::generate(
        max_m,
        dim,
        config.sigma,
        delta,
        config.bits,
        ensemble_seed,
    )?;
    // Per pair: distance and the length of the longest consistent prefix.
    let mut survivors: Vec<(f64, usize)> = Vec::with_capacity(config.pairs_per_m);
    for pair_index in 0..config.pairs_per_m {
        let mut rng = substream(config.seed, STREAM_PAIR + pair_index as u64);
        let (a, b) = sample_pair(&config.model, config.sampler, &mut rng)?;
        let qa = ensemble.quantize(&a)?;
        let qb = ensemble.quantize(&b)?;
        let prefix = qa
            .symbols()
            .iter()
            .zip(qb.symbols())
            .position(|(x, y)| x != y)
            .unwrap_or(max_m);
        survivors.push((a.distance_to(&b)?, prefix));
    }
    let mut rows = Vec::with_capacity(config.m_list.len());
    for &m in &config.m_list {
        let guarantee_distance =
            guaranteed_distance(dim, m as u64, config.guarantee_p0, &config.guarantee)?;
        let mut worst = 0.0f64;
        let mut total = 0.0f64;
        let mut consistent_pairs = 0usize;
        for &(d, prefix) in &survivors {
            if prefix >= m {
                consistent_pairs += 1;
                total += d;
                worst = worst.max(d);
            }
        }
        let sweep = PairSweep {
            worst,
            mean: if consistent_pairs > 0 { total / consistent_pairs as f64 } else { 0.0 },
            consistent_pairs,
            pairs: config.pairs_per_m,
        };
        rows.push(DecayRow {
            measurements: m,
            delta,
            worst: sweep.worst,
            mean: sweep.mean,
            consistent_pairs: sweep.consistent_pairs,
            pairs: sweep.pairs,
            guarantee_distance,
            in_fit: qualifies(config, m, &sweep),
        });
    }
    Ok(rows)
}

fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (slope * a + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some((slope, intercept, r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::QuantizedCode;

    fn unit_ball(dim: usize) -> SignalModel {
        SignalModel::unit_ball(dim).unwrap()
    }

    #[test]
    fn grid_candidates_live_in_model() {
        let set = CandidateSet {
            model: unit_ball(2),
            generator: CandidateGenerator::Grid { spacing: 0.2 },
            seed: 0,
        };
        let candidates = set.materialize().unwrap();
        assert!(candidates.iter().all(|c| set.model.contains(c)));
        // 0.2-spaced lattice inside the unit disk: count the lattice directly.
        let mut expected = 0;
        for i in -5i64..=5 {
            for j in -5i64..=5 {
                let (x, y) = (i as f64 * 0.2, j as f64 * 0.2);
                if (x * x + y * y).sqrt() <= 1.0 + 1e-12 {
                    expected += 1;
                }
            }
        }
        assert_eq!(candidates.len(), expected);
    }

    #[test]
    fn grid_too_fine_is_rejected() {
        let set = CandidateSet {
            model: unit_ball(3),
            generator: CandidateGenerator::Grid { spacing: 1e-4 },
            seed: 0,
        };
        assert!(set.materialize().is_err());
    }

    #[test]
    fn cloud_candidates_live_in_model() {
        let set = CandidateSet {
            model: unit_ball(3),
            generator: CandidateGenerator::Cloud { count: 500 },
            seed: 9,
        };
        let candidates = set.materialize().unwrap();
        assert_eq!(candidates.len(), 500);
        assert!(candidates.iter().all(|c| set.model.contains(c)));
        // Reproducible.
        assert_eq!(set.materialize().unwrap(), candidates);
    }

    #[test]
    fn search_finds_the_true_signal() {
        let ens = MeasurementEnsemble::generate(40, 2, 1.0, 0.3, 1, 77).unwrap();
        let set = CandidateSet {
            model: unit_ball(2),
            generator: CandidateGenerator::Cloud { count: 400 },
            seed: 3,
        };
        let mut candidates = set.materialize().unwrap();
        let truth = Signal::new(vec![0.31, -0.4]).unwrap();
        candidates.push(truth.clone());
        let code = ens.quantize(&truth).unwrap();
        let outcome = search_consistent(&ens, &code, &candidates).unwrap();
        assert!(outcome.consistent_count >= 1);
        // Oracle soundness: whatever came back re-quantizes to the code.
        let best = outcome.best.unwrap();
        let requantized = ens.quantize_prefix(&best, code.len()).unwrap();
        assert_eq!(requantized.symbols(), code.symbols());
    }

    #[test]
    fn empty_code_accepts_everything() {
        let ens = MeasurementEnsemble::generate(10, 2, 1.0, 0.3, 1, 5).unwrap();
        let set = CandidateSet {
            model: unit_ball(2),
            generator: CandidateGenerator::Cloud { count: 50 },
            seed: 1,
        };
        let candidates = set.materialize().unwrap();
        let empty = QuantizedCode::new(vec![], 1).unwrap();
        let outcome = search_consistent(&ens, &empty, &candidates).unwrap();
        assert_eq!(outcome.consistent_count, candidates.len());
    }

    #[test]
    fn monotone_refinement_never_grows_consistent_count() {
        let set = CandidateSet {
            model: unit_ball(2),
            generator: CandidateGenerator::Cloud { count: 600 },
            seed: 8,
        };
        let candidates = set.materialize().unwrap();
        let truth = Signal::new(vec![0.2, 0.1]).unwrap();
        // One seed, growing row counts: prefix discipline means each code
        // extends the previous one.
        let full = MeasurementEnsemble::generate(60, 2, 1.0, 0.3, 1, 123).unwrap();
        let full_code = full.quantize(&truth).unwrap();
        let mut last = usize::MAX;
        for rows in [0usize, 5, 15, 30, 60] {
            let code =
                QuantizedCode::new(full_code.symbols()[..rows].to_vec(), 1).unwrap();
            let outcome = search_consistent(&full, &code, &candidates).unwrap();
            assert!(
                outcome.consistent_count <= last,
                "count grew at rows={rows}"
            );
            last = outcome.consistent_count;
        }
    }

    #[test]
    fn search_shape_errors() {
        let ens = MeasurementEnsemble::generate(4, 2, 1.0, 0.3, 1, 5).unwrap();
        let long = QuantizedCode::new(vec![0; 5], 1).unwrap();
        assert!(search_consistent(&ens, &long, &[]).is_err());
        let wrong_bits = QuantizedCode::new(vec![0; 4], 2).unwrap();
        assert!(search_consistent(&ens, &wrong_bits, &[]).is_err());
        let code = QuantizedCode::new(vec![0; 4], 1).unwrap();
        let bad = [Signal::zeros(3).unwrap()];
        assert!(search_consistent(&ens, &code, &bad).is_err());
    }

    #[test]
    fn grid_reconstruction_error_within_guarantee() {
        // 200 random signals at K = 2, M = 60, grid spacing 0.01: a
        // consistent candidate exists and its error stays below the
        // guaranteed distance at p0 = 0.05 on at least 95% of trials.
        use crate::analytics::{guaranteed_distance, GuaranteeConstants};
        let constants = GuaranteeConstants::concrete(2).unwrap();
        let bound = guaranteed_distance(2, 60, 0.05, &constants).unwrap();
        let model = unit_ball(2);
        let candidates = CandidateSet {
            model: model.clone(),
            generator: CandidateGenerator::Grid { spacing: 0.01 },
            seed: 0,
        }
        .materialize()
        .unwrap();
        let mut ok = 0usize;
        let trials = 200usize;
        for i in 0..trials {
            let mut rng = crate::rng::substream(60_000 + i as u64, 1);
            let truth = model.sample(&mut rng).unwrap();
            // Precision comfortably above the grid spacing, so quantization
            // cells are never lost between candidates.
            let ens = MeasurementEnsemble::generate(
                60,
                2,
                1.0 / (2.0f64).sqrt(),
                1.0,
                1,
                61_000 + i as u64,
            )
            .unwrap();
            let code = ens.quantize(&truth).unwrap();
            let outcome = search_consistent(&ens, &code, &candidates).unwrap();
            if let Some(best) = outcome.best {
                // Soundness: the estimate re-quantizes to the code.
                assert_eq!(ens.quantize(&best).unwrap().symbols(), code.symbols());
                if truth.distance_to(&best).unwrap() <= bound {
                    ok += 1;
                }
            }
        }
        assert!(ok >= 190, "only {ok}/{trials} trials within the guarantee");
    }

    #[test]
    fn worst_distance_non_increasing_in_measurements_shared_mode() {
        // One arrangement, growing prefix: the consistent set only shrinks.
        let config = DecayConfig {
            model: unit_ball(3),
            m_list: (1..=10).map(|i| i * 20).collect(),
            pairs_per_m: 500,
            sigma: 1.0 / (3.0f64).sqrt(),
            bits: 1,
            seed: 4,
            delta_rule: DeltaRule::Fixed(0.3),
            mode: EnsembleMode::Shared,
            sampler: PairSampler::UniformDistance,
            guarantee: GuaranteeConstants::concrete(3).unwrap(),
            guarantee_p0: 0.05,
            min_consistent_for_fit: 1,
            resolution_floor: 0.0,
            collision_threshold: 0.1,
        };
        let report = decay_experiment(&config).unwrap();
        for pair in report.rows.windows(2) {
            assert!(
                pair[1].worst <= pair[0].worst + 1e-15,
                "worst rose from m={} to m={}",
                pair[0].measurements,
                pair[1].measurements
            );
            assert!(pair[1].consistent_pairs <= pair[0].consistent_pairs);
        }
    }

    #[test]
    fn pair_sweep_reproducible_and_counts() {
        let config = PairSweepConfig {
            measurements: 12,
            sigma: 0.5,
            delta: 0.4,
            bits: 1,
            model: unit_ball(2),
            pairs: 300,
            seed: 31,
            mode: EnsembleMode::FreshPerPair,
            sampler: PairSampler::IndependentUniform,
        };
        let a = pair_sweep(&config).unwrap();
        let b = pair_sweep(&config).unwrap();
        assert_eq!(a, b);
        assert!(a.worst >= a.mean);
        assert!(a.consistent_pairs <= a.pairs);
    }

    #[test]
    fn shared_mode_differs_but_obeys_same_contract() {
        let base = PairSweepConfig {
            measurements: 12,
            sigma: 0.5,
            delta: 0.4,
            bits: 1,
            model: unit_ball(2),
            pairs: 300,
            seed: 31,
            mode: EnsembleMode::Shared,
            sampler: PairSampler::IndependentUniform,
        };
        let shared = pair_sweep(&base).unwrap();
        assert!(shared.worst >= shared.mean);
    }

    #[test]
    fn uniform_distance_pairs_stay_in_model_and_spread() {
        let model = unit_ball(2);
        let mut small = 0usize;
        for i in 0..400u64 {
            let mut rng = crate::rng::substream(17, STREAM_PAIR + i);
            let (a, b) = sample_pair(&model, PairSampler::UniformDistance, &mut rng).unwrap();
            assert!(model.contains(&a) && model.contains(&b));
            if a.distance_to(&b).unwrap() < 0.2 {
                small += 1;
            }
        }
        // Roughly a tenth of the separations land below a tenth of the
        // diameter; independent uniform pairs would put ~1% there.
        assert!(small >= 20, "only {small} small-separation pairs out of 400");
    }

    #[test]
    fn decay_experiment_shapes() {
        let config = DecayConfig {
            model: unit_ball(2),
            m_list: vec![5, 10, 20],
            pairs_per_m: 200,
            sigma: 0.5,
            bits: 1,
            seed: 7,
            delta_rule: DeltaRule::Fixed(0.3),
            mode: EnsembleMode::FreshPerPair,
            sampler: PairSampler::UniformDistance,
            guarantee: GuaranteeConstants::concrete(2).unwrap(),
            guarantee_p0: 0.05,
            min_consistent_for_fit: 1,
            resolution_floor: 0.0,
            collision_threshold: 0.1,
        };
        let report = decay_experiment(&config).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            assert!(row.worst >= row.mean);
            assert!(row.guarantee_distance > 0.0);
        }
        // Single-entry list: fit flagged as unavailable.
        let single = DecayConfig { m_list: vec![10], ..config.clone() };
        let report = decay_experiment(&single).unwrap();
        assert!(report.fit.is_none());
        // Non-increasing list rejected.
        let bad = DecayConfig { m_list: vec![10, 10], ..config };
        assert!(decay_experiment(&bad).is_err());
    }

    #[test]
    fn match_guarantee_rule_scales_delta() {
        let config = DecayConfig {
            model: unit_ball(2),
            m_list: vec![8, 16],
            pairs_per_m: 50,
            sigma: 0.5,
            bits: 1,
            seed: 7,
            delta_rule: DeltaRule::MatchGuarantee { ratio: 1.0 },
            mode: EnsembleMode::FreshPerPair,
            sampler: PairSampler::UniformDistance,
            guarantee: GuaranteeConstants::concrete(2).unwrap(),
            guarantee_p0: 0.05,
            min_consistent_for_fit: 1,
            resolution_floor: 0.0,
            collision_threshold: 0.1,
        };
        let report = decay_experiment(&config).unwrap();
        for row in &report.rows {
            let expected = row.guarantee_distance / (2.0f64).sqrt();
            assert!((row.delta - expected).abs() < 1e-12);
        }
        assert!(report.rows[1].delta < report.rows[0].delta);
    }
}
