//! Covering-number bounds and measurement-rate planning for signal models.

use crate::error::{Error, Result};
use crate::model::SignalModel;

use super::bounds::GuaranteeConstants;
use super::special::ln_binomial;

/// Natural log of the covering-number upper bound of the model at ball
/// radius `eps`:
///
/// - unit ball: `K ln(3/eps)`
/// - sparse: `ln C(N, K) + K ln(3/eps)`
/// - union of `L` subspaces: `ln L + K ln(3/eps)`
/// - ball of radius `D` around a known signal: `K ln(3 D / eps)`
///
/// Clamped below at 0 (a covering needs at least one ball).
pub fn covering_log(model: &SignalModel, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::domain(format!("covering radius must be positive, got {eps}")));
    }
    let raw = match model {
        SignalModel::UnitBall { dim } => *dim as f64 * (3.0 / eps).ln(),
        SignalModel::Sparse { ambient, sparsity } => {
            ln_binomial(*ambient as u64, *sparsity as u64)?
                + *sparsity as f64 * (3.0 / eps).ln()
        }
        SignalModel::UnionOfSubspaces { dim, count, .. } => {
            (*count as f64).ln() + *dim as f64 * (3.0 / eps).ln()
        }
        SignalModel::SimilarSignal { center, radius } => {
            center.len() as f64 * (3.0 * radius / eps).ln()
        }
    };
    Ok(raw.max(0.0))
}

/// A planned acquisition: how many measurements (= bits at one bit per
/// measurement) guarantee worst-case distance `target_distance` over the
/// model with failure probability at most `failure_probability`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePlan {
    pub model: SignalModel,
    pub target_distance: f64,
    pub failure_probability: f64,
    /// Covering radius induced by the guarantee constants,
    /// `3 d / (leading sqrt(dim))` with the ambient dimension for sparse and
    /// union models.
    pub covering_radius: f64,
    /// `ln` of the covering-number bound at that radius.
    pub covering_log: f64,
    /// Smallest integer `m >= (covering_log + ln(1/p0)) / ln(1/decay_base)`,
    /// at least 1.
    pub required_measurements: u64,
}

/// Plan the measurement count for a model and target distance.
pub fn plan_rate(
    model: &SignalModel,
    target_distance: f64,
    failure_probability: f64,
    constants: &GuaranteeConstants,
) -> Result<RatePlan> {
    if !(target_distance.is_finite() && target_distance > 0.0) {
        return Err(Error::domain(format!(
            "target distance must be positive, got {target_distance}"
        )));
    }
    if !(failure_probability > 0.0 && failure_probability < 1.0) {
        return Err(Error::domain(format!(
            "failure probability must be in (0, 1), got {failure_probability}"
        )));
    }
    if !(constants.decay_base > 0.5 && constants.decay_base < 1.0) {
        return Err(Error::parameter(format!(
            "decay base must be in (1/2, 1), got {}",
            constants.decay_base
        )));
    }
    // The sparse and union models scale sigma and delta with the ambient
    // dimension; the ball models with their own dimension.
    let scale_dim = model.ambient_dim() as f64;
    let covering_radius = 3.0 * target_distance / (constants.leading * scale_dim.sqrt());
    let clog = covering_log(model, covering_radius)?;
    let rhs = (clog + (1.0 / failure_probability).ln()) / (1.0 / constants.decay_base).ln();
    let required = rhs.ceil().max(1.0) as u64;
    Ok(RatePlan {
        model: model.clone(),
        target_distance,
        failure_probability,
        covering_radius,
        covering_log: clog,
        required_measurements: required,
    })
}
