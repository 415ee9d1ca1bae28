//! Failure-probability bounds: the Gaussian norm tail, the ball-pair bound,
//! the guarantee constants, and the quantities derived from them.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

use super::consistency::consistency_probability;
use super::special::gamma_upper_regularized_half;

/// `P(||phi|| >= threshold)` for `phi` with `dim` i.i.d. `Normal(0, sigma^2)`
/// entries: the chi tail `Q(dim/2, threshold^2 / (2 sigma^2))` with `Q` the
/// regularized upper incomplete gamma function.
pub fn norm_tail(dim: usize, sigma: f64, threshold: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::parameter("dimension must be at least 1"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain("sigma must be positive and finite"));
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::domain("norm threshold must be positive and finite"));
    }
    gamma_upper_regularized_half(dim as u64, threshold * threshold / (2.0 * sigma * sigma))
}

/// Upper bound on the probability that one measurement fails to separate two
/// radius-`radius` balls whose centers are `d` apart:
///
/// `min(1, P(consistent | d) + 2 cap radius / delta + norm_tail)`
///
/// Requires `2 cap radius < delta` so that a ball projection can fit inside
/// one quantization interval.
pub fn ball_failure_bound(
    d: f64,
    radius: f64,
    cap: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
) -> Result<f64> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::parameter("ball radius must be >= 0"));
    }
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Error::parameter("norm cap must be positive"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::parameter("delta must be positive"));
    }
    if 2.0 * cap * radius >= delta {
        return Err(Error::parameter(format!(
            "need 2 * cap * radius < delta, got {} >= {delta}",
            2.0 * cap * radius
        )));
    }
    let consistent = consistency_probability(d, sigma, delta)?;
    let tail = norm_tail(dim, sigma, cap)?;
    Ok((consistent + 2.0 * cap * radius / delta + tail).min(1.0))
}

/// Parameters of the guarantee construction: the signal dimension, the norm
/// cap on measurement vectors, and the two design ratios tying the covering
/// radius and the precision to the target distance
/// (`epsilon = delta * slack_ratio / (2 cap)`, `delta = d * precision_ratio / sqrt(dim)`,
/// with `sigma = 1 / sqrt(dim)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuaranteeParams {
    pub dim: usize,
    pub norm_cap: f64,
    pub slack_ratio: f64,
    pub precision_ratio: f64,
}

/// The two constants of the distance guarantee: the leading coefficient and
/// the per-measurement decay base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuaranteeConstants {
    pub leading: f64,
    pub decay_base: f64,
}

impl GuaranteeParams {
    pub fn new(dim: usize, norm_cap: f64, slack_ratio: f64, precision_ratio: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::parameter("dimension must be at least 1"));
        }
        if !(norm_cap.is_finite() && norm_cap > 0.0) {
            return Err(Error::parameter("norm cap must be positive"));
        }
        if !(slack_ratio > 0.0 && slack_ratio < 1.0) {
            return Err(Error::parameter(format!(
                "slack ratio must be in (0, 1), got {slack_ratio}"
            )));
        }
        if !(precision_ratio.is_finite() && precision_ratio > 0.0) {
            return Err(Error::parameter("precision ratio must be positive"));
        }
        Ok(GuaranteeParams { dim, norm_cap, slack_ratio, precision_ratio })
    }

    /// Leading coefficient `6 * cap / (slack_ratio * precision_ratio)`.
    pub fn leading_coeff(&self) -> f64 {
        6.0 * self.norm_cap / (self.slack_ratio * self.precision_ratio)
    }

    /// The three nonnegative summands added to 1/2 in the decay base: the
    /// consistency-probability term, the slack ratio, and the norm tail at
    /// `sigma = 1/sqrt(dim)`.
    pub fn decay_base_terms(&self) -> Result<(f64, f64, f64)> {
        let gauss = 0.5 * (-PI * PI / (2.0 * self.precision_ratio * self.precision_ratio)).exp();
        let sigma = 1.0 / (self.dim as f64).sqrt();
        let tail = norm_tail(self.dim, sigma, self.norm_cap)?;
        Ok((gauss, self.slack_ratio, tail))
    }

    /// The per-measurement decay base `1/2 + gauss + slack + tail`.
    pub fn decay_base(&self) -> Result<f64> {
        let (gauss, slack, tail) = self.decay_base_terms()?;
        Ok(0.5 + gauss + slack + tail)
    }

    /// Constants derived from these parameters.
    pub fn constants(&self) -> Result<GuaranteeConstants> {
        Ok(GuaranteeConstants { leading: self.leading_coeff(), decay_base: self.decay_base()? })
    }
}

impl GuaranteeConstants {
    pub fn new(leading: f64, decay_base: f64) -> Result<Self> {
        if !(leading.is_finite() && leading > 0.0) {
            return Err(Error::parameter("leading coefficient must be positive"));
        }
        if !(decay_base > 0.5 && decay_base < 1.0) {
            return Err(Error::parameter(format!(
                "decay base must be in (1/2, 1), got {decay_base}"
            )));
        }
        Ok(GuaranteeConstants { leading, decay_base })
    }

    /// The stock concrete instance (cap 2, covering radius `delta/20`,
    /// `delta = d / sqrt(dim)`), giving `(leading, decay_base) = (60, 3/4)`.
    /// Validated against the defining sum before returning.
    pub fn concrete(dim: usize) -> Result<Self> {
        let params = GuaranteeParams::new(dim, 2.0, 0.2, 1.0)?;
        let base_sum = params.decay_base()?;
        if base_sum > 0.75 {
            return Err(Error::parameter(format!(
                "decay-base sum {base_sum} exceeds 3/4 at dim {dim}"
            )));
        }
        debug_assert!((params.leading_coeff() - 60.0).abs() < 1e-9);
        Ok(GuaranteeConstants { leading: 60.0, decay_base: 0.75 })
    }
}

/// The guarantee failure bound for `measurements` quantized measurements of
/// the unit ball at separation `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureBound {
    /// Natural log of the bound; always finite.
    pub ln_value: f64,
    /// `exp(ln_value)`, which may round to 0 or overflow to infinity at the
    /// extremes. Values >= 1 mean the bound is uninformative at this `m`.
    pub value: f64,
}

/// `(leading sqrt(dim) / d)^(2 dim) * decay_base^m`, evaluated in log space.
///
/// The separation must lie in `(0, 2]` (the diameter of the unit-ball signal
/// set); a decay base >= 1 is reported as a vacuous bound rather than being
/// silently evaluated.
pub fn failure_bound(
    dim: usize,
    separation: f64,
    measurements: u64,
    constants: &GuaranteeConstants,
) -> Result<FailureBound> {
    if dim == 0 {
        return Err(Error::parameter("dimension must be at least 1"));
    }
    if !(separation > 0.0 && separation <= 2.0) {
        return Err(Error::domain(format!(
            "separation must be in (0, 2], got {separation}"
        )));
    }
    if constants.decay_base >= 1.0 || constants.decay_base.is_nan() {
        return Err(Error::VacuousBound { decay_base: constants.decay_base });
    }
    if !(constants.decay_base > 0.0 && constants.leading > 0.0) {
        return Err(Error::parameter("constants must be positive"));
    }
    let k = dim as f64;
    let ln_value = 2.0 * k * (constants.leading * k.sqrt() / separation).ln()
        + measurements as f64 * constants.decay_base.ln();
    Ok(FailureBound { ln_value, value: ln_value.exp() })
}

/// Distance guaranteed to force distinct codes with probability `1 - p0`:
///
/// `d(m) = leading * sqrt(dim) * p0^(-1/(2 dim)) * decay_base^(m/(2 dim))`,
///
/// exponentially decaying in `m`. Evaluated in log space.
pub fn guaranteed_distance(
    dim: usize,
    measurements: u64,
    p0: f64,
    constants: &GuaranteeConstants,
) -> Result<f64> {
    if dim == 0 {
        return Err(Error::parameter("dimension must be at least 1"));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::domain(format!("failure probability must be in (0, 1), got {p0}")));
    }
    if !(constants.decay_base > 0.5 && constants.decay_base < 1.0) {
        return Err(Error::parameter(format!(
            "decay base must be in (1/2, 1), got {}",
            constants.decay_base
        )));
    }
    let two_k = 2.0 * dim as f64;
    let ln_d = constants.leading.ln() + 0.5 * (dim as f64).ln() - p0.ln() / two_k
        + measurements as f64 * constants.decay_base.ln() / two_k;
    Ok(ln_d.exp())
}

/// Bits-per-dimension overhead `2 ln 2 / ln(1 / decay_base)` relative to fine
/// scalar quantization of an orthonormal expansion.
pub fn rate_overhead(decay_base: f64) -> Result<f64> {
    if !(decay_base > 0.5 && decay_base < 1.0) {
        return Err(Error::domain(format!(
            "decay base must be in (1/2, 1), got {decay_base}"
        )));
    }
    Ok(2.0 * LN_2 / (1.0 / decay_base).ln())
}

/// Smallest measurement count matching the worst-case error of a `bits`-deep
/// orthonormal-expansion quantizer with probability `1 - p0`:
///
/// `m >= 2 dim (bits ln 2 + ln(leading/2)) + ln(1/p0)) / ln(1/decay_base)`.
pub fn required_measurements(
    bits: u32,
    dim: usize,
    p0: f64,
    constants: &GuaranteeConstants,
) -> Result<u64> {
    if bits == 0 {
        return Err(Error::parameter("bit depth must be at least 1"));
    }
    if dim == 0 {
        return Err(Error::parameter("dimension must be at least 1"));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::domain(format!("failure probability must be in (0, 1), got {p0}")));
    }
    if !(constants.decay_base > 0.5 && constants.decay_base < 1.0) {
        return Err(Error::domain(format!(
            "decay base must be in (1/2, 1), got {}",
            constants.decay_base
        )));
    }
    let k = dim as f64;
    let ln_inv_base = (1.0 / constants.decay_base).ln();
    let rhs =
        (2.0 * k * (bits as f64 * LN_2 + (constants.leading / 2.0).ln()) + (1.0 / p0).ln())
            / ln_inv_base;
    Ok((rhs.ceil().max(1.0)) as u64)
}
