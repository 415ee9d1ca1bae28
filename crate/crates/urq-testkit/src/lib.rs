//! Independent numeric oracles for the test suites.
//!
//! Everything here is deliberately written from scratch against the defining
//! formulas (adaptive quadrature instead of closed forms, a continued
//! fraction instead of finite gamma series), so the library implementations
//! are checked by a different computational route.

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance
/// `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        let s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        (m, fm, s)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// The periodic consistency law for one measurement given projected distance
/// `l` (reference reimplementation): period `2^bits * delta`, linear flanks
/// of width `delta` around multiples of the period, zero in between.
pub fn reference_projected_consistency(l: f64, delta: f64, bits: u32) -> f64 {
    let period = (1u64 << bits) as f64 * delta;
    let mut r = l % period;
    if r < 0.0 {
        r += period;
    }
    if r <= delta {
        1.0 - r / delta
    } else if r >= period - delta {
        (r - (period - delta)) / delta
    } else {
        0.0
    }
}

/// Half-normal density with scale `s` (the distribution of `|Z|` for
/// `Z ~ Normal(0, s^2)`).
pub fn half_normal_pdf(l: f64, s: f64) -> f64 {
    if l < 0.0 {
        return 0.0;
    }
    (2.0 / std::f64::consts::PI).sqrt() * (-l * l / (2.0 * s * s)).exp() / s
}

/// Quadrature oracle for the consistency probability at signal distance `d`:
/// integrates the projected law against the half-normal density segment by
/// segment (segments aligned to the kinks at multiples of `delta`), far
/// enough into the tail that the remainder is below `tol`.
pub fn consistency_probability_quadrature(
    d: f64,
    sigma: f64,
    delta: f64,
    bits: u32,
    tol: f64,
) -> Result<f64, String> {
    if d < 0.0 || sigma <= 0.0 || delta <= 0.0 || bits == 0 {
        return Err("bad arguments".into());
    }
    if d == 0.0 {
        return Ok(1.0);
    }
    let s = sigma * d;
    // erfc(10/sqrt(2)) ~ 1.5e-23: integrating to 10 standard deviations
    // leaves nothing at the tolerances used by the tests.
    let l_max = 10.0 * s + 2.0 * delta;
    let segments = (l_max / delta).ceil() as usize;
    let f = |l: f64| reference_projected_consistency(l, delta, bits) * half_normal_pdf(l, s);
    let seg_tol = tol / segments as f64;
    let mut total = 0.0;
    for i in 0..segments {
        let a = i as f64 * delta;
        let b = (i + 1) as f64 * delta;
        total += integrate(&f, a, b, seg_tol);
    }
    Ok(total)
}

/// Regularized upper incomplete gamma function `Q(a, x)` via power series /
/// Lentz continued fraction (reference implementation, independent of the
/// finite half-integer forms in the library).
pub fn gamma_q(a: f64, x: f64) -> Result<f64, String> {
    if a <= 0.0 || x < 0.0 {
        return Err(format!("gamma_q domain: a={a}, x={x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let ln_pre = a * x.ln() - x - libm::lgamma(a);
    if x < a + 1.0 {
        // Series for P(a, x), then complement.
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..500 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                return Ok(1.0 - ln_pre.exp() * sum);
            }
        }
        Err("series did not converge".into())
    } else {
        // Lentz continued fraction for Q(a, x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                return Ok(ln_pre.exp() * h);
            }
        }
        Err("continued fraction did not converge".into())
    }
}

/// Chi-square goodness-of-fit p-value for observed bin counts against
/// expected bin probabilities. Returns `P(chi2 >= statistic)` with
/// `bins - 1` degrees of freedom.
pub fn chi_square_gof_pvalue(observed: &[u64], probabilities: &[f64]) -> Result<f64, String> {
    if observed.len() != probabilities.len() || observed.len() < 2 {
        return Err("need matching bins, at least two".into());
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err("no observations".into());
    }
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probabilities) {
        let expected = n as f64 * p;
        if expected <= 0.0 {
            return Err("expected count must be positive in every bin".into());
        }
        let diff = o as f64 - expected;
        stat += diff * diff / expected;
    }
    let dof = (observed.len() - 1) as f64;
    gamma_q(dof / 2.0, stat / 2.0)
}

/// Ordinary least squares of `y` on `x`; returns `(slope, intercept, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64), String> {
    if x.len() != y.len() || x.len() < 2 {
        return Err("need at least two matching points".into());
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err("degenerate abscissa".into());
    }
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
    Ok((slope, intercept, r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(&|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = integrate(&|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn half_normal_integrates_to_one() {
        let v = integrate(&|l| half_normal_pdf(l, 0.7), 0.0, 10.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_q_known_values() {
        assert!((gamma_q(1.0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-14);
        assert!((gamma_q(0.5, 2.0).unwrap() - libm::erfc(2.0f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn quadrature_consistency_at_zero_distance() {
        assert_eq!(
            consistency_probability_quadrature(0.0, 1.0, 1.0, 1, 1e-10).unwrap(),
            1.0
        );
    }

    #[test]
    fn fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (slope, intercept, r2) = linear_fit(&x, &y).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gof_accepts_uniform_counts() {
        let observed = [1000u64, 1010, 990, 1000];
        let probs = [0.25; 4];
        let p = chi_square_gof_pvalue(&observed, &probs).unwrap();
        assert!(p > 0.5, "p-value {p}");
    }
}
