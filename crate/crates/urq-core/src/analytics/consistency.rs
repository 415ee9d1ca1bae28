//! Consistency probabilities for a single quantized measurement.
//!
//! Given two signals at distance `d`, the projected distance
//! `l = |<x - x', phi>|` is half-normal with scale `sigma * d`, and the dither
//! makes the probability that both signals quantize to the same symbol a
//! periodic triangle function of `l`. Everything here is an exact consequence
//! of those two facts.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

use super::special::{normal_interval, normal_pdf};

/// Default truncation tolerance for the series evaluation.
pub const SERIES_TOL: f64 = 1e-15;

fn check_scales(sigma: f64, delta: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::parameter("sigma must be positive and finite"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::parameter("delta must be positive and finite"));
    }
    Ok(())
}

fn check_distance(d: f64) -> Result<()> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::domain(format!("distance must be >= 0, got {d}")));
    }
    Ok(())
}

/// Probability that one binary measurement is consistent for two signals with
/// projected distance `l`: the periodic triangle of period `2 delta`, equal
/// to 1 at even multiples of `delta` and 0 at odd multiples.
pub fn projected_consistency(l: f64, delta: f64) -> Result<f64> {
    check_scales(1.0, delta)?;
    if !l.is_finite() || l < 0.0 {
        return Err(Error::domain(format!("projected distance must be >= 0, got {l}")));
    }
    let r = l.rem_euclid(2.0 * delta);
    Ok(if r <= delta { 1.0 - r / delta } else { r / delta - 1.0 })
}

/// Multibit version of [`projected_consistency`]: period `2^bits * delta`,
/// equal to the binary triangle on the `delta`-wide flanks around multiples
/// of the period and exactly zero on the dead zones in between. Reduces to
/// the binary law at `bits = 1`.
pub fn projected_consistency_multibit(l: f64, delta: f64, bits: u32) -> Result<f64> {
    check_scales(1.0, delta)?;
    if !l.is_finite() || l < 0.0 {
        return Err(Error::domain(format!("projected distance must be >= 0, got {l}")));
    }
    if bits == 0 || bits > crate::quantizer::MAX_BITS {
        return Err(Error::parameter(format!("bit depth must be in 1..=32, got {bits}")));
    }
    let period = (1u64 << bits) as f64 * delta;
    let r = l.rem_euclid(period);
    Ok(if r <= delta {
        1.0 - r / delta
    } else if r >= period - delta {
        (r - (period - delta)) / delta
    } else {
        0.0
    })
}

/// Expected value of a unit tent of half-width `delta` centered at `c` under
/// `Normal(0, scale^2)`; closed form via the Gaussian cdf/pdf.
fn tent_expectation(c: f64, scale: f64, delta: f64) -> f64 {
    let left = normal_interval(c - delta, c, scale);
    let right = normal_interval(c, c + delta, scale);
    let s2 = scale * scale;
    ((delta - c) / delta) * left
        + ((delta + c) / delta) * right
        + (s2 / delta)
            * (normal_pdf(c - delta, scale) + normal_pdf(c + delta, scale)
                - 2.0 * normal_pdf(c, scale))
}

/// Sum of tent expectations at centers `0, period, 2*period, ...` (doubling
/// the off-center terms), which equals the integral of the periodic
/// consistency law against the half-normal projected-distance density.
fn tent_sum(scale: f64, delta: f64, period: f64, tol: f64) -> f64 {
    let mut total = tent_expectation(0.0, scale, delta);
    let mut j = 1u64;
    loop {
        let c = j as f64 * period;
        let term = 2.0 * tent_expectation(c, scale, delta);
        total += term;
        // Terms are dominated by the normal mass within one tent of the
        // center, which decays monotonically once c exceeds the scale.
        if (term < tol * 0.25 && c > scale) || c > 12.0 * scale + period {
            break;
        }
        j += 1;
    }
    total.clamp(0.0, 1.0)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// The same expectation through the Fourier series of the periodic law:
///
/// `P = (delta/period) [1 + 2 sum_{k>=1} sinc^2(k delta/period) e^{-2 (pi k scale / period)^2}]`
///
/// At `period = 2 delta` the surviving odd terms are exactly the documented
/// binary series. Converges fast when `scale` is at least a quarter period.
fn fourier_sum(scale: f64, delta: f64, period: f64, tol: f64) -> f64 {
    let base = delta / period;
    let mut total = base;
    let mut k = 1u64;
    loop {
        let phase = k as f64 * scale / period;
        let envelope = 2.0 * base * (-2.0 * (PI * phase).powi(2)).exp();
        total += envelope * sinc(k as f64 * delta / period).powi(2);
        // Stop on the envelope, not the term: the sinc factor has exact
        // zeros that would end the sum early.
        if envelope < tol {
            break;
        }
        k += 1;
    }
    total.clamp(0.0, 1.0)
}

/// Expectation of the periodic consistency law (tents of half-width `delta`
/// every `period`) under a half-normal projected distance of the given
/// scale: projected-domain sum when the scale is small against the period,
/// frequency-domain sum otherwise. Both routes are exact; only their
/// truncation cost differs.
fn law_expectation(scale: f64, delta: f64, period: f64, tol: f64) -> f64 {
    if scale < 0.25 * period {
        tent_sum(scale, delta, period, tol)
    } else {
        fourier_sum(scale, delta, period, tol)
    }
}

/// Probability that one binary measurement is consistent for two signals at
/// distance `d`, truncating terms below `tol`:
///
/// `P = 1/2 + sum_{i>=0} exp(-(pi (2i+1) sigma d / (sqrt(2) delta))^2) / (pi (i+1/2))^2`
///
/// `d = 0` returns exactly 1 (the tail sums to 1/2). The frequency-domain sum
/// above converges fast when `sigma d` is comparable to `delta`; for small
/// `sigma d / delta` the same quantity is evaluated through its projected-
/// domain dual (the tent sum), which is the Poisson transform of the series
/// and needs only a couple of closed-form terms there.
pub fn consistency_probability_tol(d: f64, sigma: f64, delta: f64, tol: f64) -> Result<f64> {
    check_scales(sigma, delta)?;
    check_distance(d)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::parameter("tolerance must be positive"));
    }
    if d == 0.0 {
        return Ok(1.0);
    }
    Ok(law_expectation(sigma * d, delta, 2.0 * delta, tol))
}

/// [`consistency_probability_tol`] with the default tolerance.
pub fn consistency_probability(d: f64, sigma: f64, delta: f64) -> Result<f64> {
    consistency_probability_tol(d, sigma, delta, SERIES_TOL)
}

/// Consistency probability for a `bits`-deep quantizer: the integral of the
/// multibit projected law against the half-normal density, evaluated through
/// the closed-form tent sum with tents at multiples of `2^bits * delta`.
pub fn consistency_probability_multibit(d: f64, sigma: f64, delta: f64, bits: u32) -> Result<f64> {
    check_scales(sigma, delta)?;
    check_distance(d)?;
    if bits == 0 || bits > crate::quantizer::MAX_BITS {
        return Err(Error::parameter(format!("bit depth must be in 1..=32, got {bits}")));
    }
    if d == 0.0 {
        return Ok(1.0);
    }
    let period = (1u64 << bits) as f64 * delta;
    Ok(law_expectation(sigma * d, delta, period, SERIES_TOL))
}

/// The exact consistency probability together with the three closed-form
/// bounds around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyBounds {
    /// The series value.
    pub exact_series: f64,
    /// `1/2 + (4/pi^2) e^{-(pi sigma d / (sqrt(2) delta))^2}` (first series term).
    pub lower_first_term: f64,
    /// `1 - sqrt(2/pi) sigma d / delta`; unclamped, so it goes negative for
    /// large distances where it is vacuous.
    pub lower_linear: f64,
    /// `1/2 + (1/2) e^{-(pi sigma d / (sqrt(2) delta))^2}`.
    pub upper: f64,
}

/// Evaluate the exact probability and its bounds at distance `d`.
pub fn consistency_bounds(d: f64, sigma: f64, delta: f64) -> Result<ConsistencyBounds> {
    check_scales(sigma, delta)?;
    check_distance(d)?;
    let exact_series = consistency_probability(d, sigma, delta)?;
    let gauss = (-(PI * sigma * d / (SQRT_2 * delta)).powi(2)).exp();
    Ok(ConsistencyBounds {
        exact_series,
        lower_first_term: 0.5 + 4.0 / (PI * PI) * gauss,
        lower_linear: 1.0 - (2.0 / PI).sqrt() * sigma * d / delta,
        upper: 0.5 + 0.5 * gauss,
    })
}
