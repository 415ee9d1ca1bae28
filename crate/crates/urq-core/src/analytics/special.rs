//! Special functions needed by the bounds: the regularized upper incomplete
//! gamma function at half-integer shape (chi tail probabilities), log
//! binomials, and Gaussian cdf helpers.

use crate::error::{Error, Result};

/// Standard normal cdf.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// `P(a <= Z <= b)` for `Z ~ Normal(0, scale^2)`, computed through erfc so
/// that far tails keep relative accuracy.
pub fn normal_interval(a: f64, b: f64, scale: f64) -> f64 {
    let denom = scale * std::f64::consts::SQRT_2;
    0.5 * (libm::erfc(a / denom) - libm::erfc(b / denom))
}

/// Density of `Normal(0, scale^2)` at `t`.
pub fn normal_pdf(t: f64, scale: f64) -> f64 {
    let z = t / scale;
    (-0.5 * z * z).exp() / (scale * (2.0 * std::f64::consts::PI).sqrt())
}

/// Regularized upper incomplete gamma function `Q(s, x)` for half-integer
/// shape `s = half_shape_numerator / 2`.
///
/// Integer shapes use the finite series `Q(n, x) = e^{-x} sum_{j<n} x^j/j!`
/// and half-integer shapes build on `Q(1/2, x) = erfc(sqrt(x))` via the
/// recurrence `Q(s+1, x) = Q(s, x) + x^s e^{-x} / Gamma(s+1)`. Both are exact
/// finite forms; each term is evaluated in log space so large `x` and large
/// shape cannot overflow.
pub fn gamma_upper_regularized_half(half_shape_numerator: u64, x: f64) -> Result<f64> {
    if half_shape_numerator == 0 {
        return Err(Error::parameter("gamma shape must be positive"));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!("gamma argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let ln_x = x.ln();
    let q = if half_shape_numerator.is_multiple_of(2) {
        let n = half_shape_numerator / 2;
        let mut sum = 0.0;
        for j in 0..n {
            let j = j as f64;
            sum += (j * ln_x - x - libm::lgamma(j + 1.0)).exp();
        }
        sum
    } else {
        let steps = (half_shape_numerator - 1) / 2;
        let mut q = libm::erfc(x.sqrt());
        for j in 0..steps {
            let s = j as f64 + 0.5;
            q += (s * ln_x - x - libm::lgamma(s + 1.0)).exp();
        }
        q
    };
    Ok(q.min(1.0))
}

/// `ln C(n, k)` through log-gamma (never through factorials).
pub fn ln_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::parameter(format!("binomial needs k <= n, got k={k}, n={n}")));
    }
    let n = n as f64;
    let k = k as f64;
    Ok(libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0))
}
