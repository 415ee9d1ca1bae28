//! Python bindings: the measurement/quantization pipeline, the analytic
//! consistency laws and bounds, the rate planners, and the Monte Carlo
//! estimators.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use urq_core::analytics;
use urq_core::model::SignalModel;
use urq_core::montecarlo;
use urq_core::{MeasurementEnsemble, QuantizedCode, Signal};

fn err(e: urq_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn constants(
    c_o: Option<f64>,
    c_r: Option<f64>,
    dim: usize,
) -> PyResult<analytics::GuaranteeConstants> {
    match (c_o, c_r) {
        (None, None) => analytics::GuaranteeConstants::concrete(dim).map_err(err),
        (Some(leading), Some(decay_base)) => {
            analytics::GuaranteeConstants::new(leading, decay_base).map_err(err)
        }
        _ => Err(PyValueError::new_err("provide both c_o and c_r, or neither")),
    }
}

/// The randomized acquisition system: Gaussian measurement matrix, uniform
/// dither, precision, and bit depth, regenerable from its seed.
#[pyclass(name = "Ensemble")]
struct PyEnsemble {
    inner: MeasurementEnsemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    fn new(rows: usize, dim: usize, sigma: f64, delta: f64, bits: u32, seed: u64) -> PyResult<Self> {
        Ok(PyEnsemble {
            inner: MeasurementEnsemble::generate(rows, dim, sigma, delta, bits, seed)
                .map_err(err)?,
        })
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn bits(&self) -> u32 {
        self.inner.bits()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    #[getter]
    fn delta(&self) -> Option<f64> {
        self.inner.uniform_delta()
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.inner.seed()
    }

    /// Dithered measurements `y = Phi x + w`.
    fn measure(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let signal = Signal::new(x).map_err(err)?;
        self.inner.measure(&signal).map_err(err)
    }

    /// Quantized code `Q(y / delta)`, symbols in `{0, ..., 2^bits - 1}`.
    fn quantize(&self, x: Vec<f64>) -> PyResult<Vec<u32>> {
        let signal = Signal::new(x).map_err(err)?;
        Ok(self.inner.quantize(&signal).map_err(err)?.symbols().to_vec())
    }

    /// Quantize against the leading `rows` measurements only.
    fn quantize_prefix(&self, x: Vec<f64>, rows: usize) -> PyResult<Vec<u32>> {
        let signal = Signal::new(x).map_err(err)?;
        Ok(self
            .inner
            .quantize_prefix(&signal, rows)
            .map_err(err)?
            .symbols()
            .to_vec())
    }

    /// Serialize the generating parameters (the matrix itself is regenerated
    /// from the seed on load).
    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(std::path::Path::new(path)).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyEnsemble {
            inner: MeasurementEnsemble::load(std::path::Path::new(path)).map_err(err)?,
        })
    }
}

/// `ceil(v) mod 2^bits`, normalized to `{0, ..., 2^bits - 1}`.
#[pyfunction]
fn quantize_scalar(v: f64, bits: u32) -> PyResult<u32> {
    urq_core::quantize_scalar(v, bits).map_err(err)
}

/// Compare two codes: returns `(equal, hamming_distance)`.
#[pyfunction]
fn consistency(a: Vec<u32>, b: Vec<u32>, bits: u32) -> PyResult<(bool, usize)> {
    let a = QuantizedCode::new(a, bits).map_err(err)?;
    let b = QuantizedCode::new(b, bits).map_err(err)?;
    let c = a.consistency(&b).map_err(err)?;
    Ok((c.equal, c.hamming))
}

/// Consistency probability for one binary measurement given the projected
/// distance (the periodic triangle law).
#[pyfunction]
fn projected_consistency(l: f64, delta: f64) -> PyResult<f64> {
    analytics::projected_consistency(l, delta).map_err(err)
}

/// Multibit projected law: triangle flanks with dead zones in between.
#[pyfunction]
fn projected_consistency_multibit(l: f64, delta: f64, bits: u32) -> PyResult<f64> {
    analytics::projected_consistency_multibit(l, delta, bits).map_err(err)
}

/// Exact probability that one binary measurement is consistent for two
/// signals at distance `d`.
#[pyfunction]
fn consistency_probability(d: f64, sigma: f64, delta: f64) -> PyResult<f64> {
    analytics::consistency_probability(d, sigma, delta).map_err(err)
}

/// Multibit consistency probability.
#[pyfunction]
fn consistency_probability_multibit(d: f64, sigma: f64, delta: f64, bits: u32) -> PyResult<f64> {
    analytics::consistency_probability_multibit(d, sigma, delta, bits).map_err(err)
}

/// `(exact, lower_first_term, lower_linear, upper)` at distance `d`.
#[pyfunction]
fn consistency_bounds(d: f64, sigma: f64, delta: f64) -> PyResult<(f64, f64, f64, f64)> {
    let b = analytics::consistency_bounds(d, sigma, delta).map_err(err)?;
    Ok((b.exact_series, b.lower_first_term, b.lower_linear, b.upper))
}

/// `P(||phi|| >= threshold)` for a Gaussian vector with `dim` entries.
#[pyfunction]
fn norm_tail(dim: usize, sigma: f64, threshold: f64) -> PyResult<f64> {
    analytics::norm_tail(dim, sigma, threshold).map_err(err)
}

/// Single-measurement failure bound for two balls of radius `radius` at
/// center distance `d`.
#[pyfunction]
fn ball_failure_bound(
    d: f64,
    radius: f64,
    cap: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
) -> PyResult<f64> {
    analytics::ball_failure_bound(d, radius, cap, sigma, delta, dim).map_err(err)
}

/// The stock concrete guarantee constants `(60, 3/4)`, validated for
/// this dimension.
#[pyfunction]
fn concrete_constants(dim: usize) -> PyResult<(f64, f64)> {
    let c = analytics::GuaranteeConstants::concrete(dim).map_err(err)?;
    Ok((c.leading, c.decay_base))
}

/// `(ln_bound, bound)` on the probability that some pair at distance >=
/// `separation` stays consistent through `measurements` measurements.
#[pyfunction]
#[pyo3(signature = (dim, separation, measurements, c_o=None, c_r=None))]
fn failure_bound(
    dim: usize,
    separation: f64,
    measurements: u64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<(f64, f64)> {
    let c = constants(c_o, c_r, dim)?;
    let fb = analytics::failure_bound(dim, separation, measurements, &c).map_err(err)?;
    Ok((fb.ln_value, fb.value))
}

/// Distance guaranteed (with probability `1 - p0`) to force distinct codes.
#[pyfunction]
#[pyo3(signature = (dim, measurements, p0, c_o=None, c_r=None))]
fn guaranteed_distance(
    dim: usize,
    measurements: u64,
    p0: f64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<f64> {
    let c = constants(c_o, c_r, dim)?;
    analytics::guaranteed_distance(dim, measurements, p0, &c).map_err(err)
}

/// Bits-per-dimension overhead `2 ln 2 / ln(1/decay_base)`.
#[pyfunction]
fn rate_overhead(decay_base: f64) -> PyResult<f64> {
    analytics::rate_overhead(decay_base).map_err(err)
}

/// Smallest measurement count matching a `bits`-deep orthonormal-expansion
/// quantizer with failure probability `p0`.
#[pyfunction]
#[pyo3(signature = (bits, dim, p0, c_o=None, c_r=None))]
fn required_measurements(
    bits: u32,
    dim: usize,
    p0: f64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<u64> {
    let c = constants(c_o, c_r, dim)?;
    analytics::required_measurements(bits, dim, p0, &c).map_err(err)
}

fn plan(model: SignalModel, d: f64, p0: f64, c_o: Option<f64>, c_r: Option<f64>) -> PyResult<(u64, f64, f64)> {
    let c = constants(c_o, c_r, model.intrinsic_dim())?;
    let plan = analytics::plan_rate(&model, d, p0, &c).map_err(err)?;
    Ok((plan.required_measurements, plan.covering_log, plan.covering_radius))
}

/// Measurement count for the unit ball: returns
/// `(required_m, covering_log, covering_radius)`.
#[pyfunction]
#[pyo3(signature = (dim, d, p0, c_o=None, c_r=None))]
fn plan_unit_ball(
    dim: usize,
    d: f64,
    p0: f64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<(u64, f64, f64)> {
    plan(SignalModel::unit_ball(dim).map_err(err)?, d, p0, c_o, c_r)
}

/// Measurement count for `sparsity`-sparse signals in `ambient` dimensions.
#[pyfunction]
#[pyo3(signature = (ambient, sparsity, d, p0, c_o=None, c_r=None))]
fn plan_sparse(
    ambient: usize,
    sparsity: usize,
    d: f64,
    p0: f64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<(u64, f64, f64)> {
    plan(SignalModel::sparse(ambient, sparsity).map_err(err)?, d, p0, c_o, c_r)
}

/// Measurement count for a union of `count` subspaces of dimension `dim`.
#[pyfunction]
#[pyo3(signature = (ambient, dim, count, d, p0, c_o=None, c_r=None))]
fn plan_union(
    ambient: usize,
    dim: usize,
    count: usize,
    d: f64,
    p0: f64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<(u64, f64, f64)> {
    plan(
        SignalModel::union_described(ambient, dim, count).map_err(err)?,
        d,
        p0,
        c_o,
        c_r,
    )
}

/// Measurement count for signals within `radius` of a known signal.
#[pyfunction]
#[pyo3(signature = (dim, radius, d, p0, c_o=None, c_r=None))]
fn plan_similar(
    dim: usize,
    radius: f64,
    d: f64,
    p0: f64,
    c_o: Option<f64>,
    c_r: Option<f64>,
) -> PyResult<(u64, f64, f64)> {
    let center = Signal::zeros(dim).map_err(err)?;
    plan(SignalModel::similar_signal(center, radius).map_err(err)?, d, p0, c_o, c_r)
}

/// Monte Carlo single-measurement consistency estimate: `(mean, stderr)`.
#[pyfunction]
fn mc_consistency(
    d: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
    bits: u32,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let e = montecarlo::estimate_consistency(d, sigma, delta, dim, bits, trials, seed)
        .map_err(err)?;
    Ok((e.mean, e.stderr))
}

/// Monte Carlo norm-tail estimate: `(mean, stderr)`.
#[pyfunction]
fn mc_norm_tail(
    dim: usize,
    sigma: f64,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let e = montecarlo::estimate_norm_tail(dim, sigma, threshold, trials, seed).map_err(err)?;
    Ok((e.mean, e.stderr))
}

/// Monte Carlo ball-failure estimate: `(mean, stderr)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn mc_ball_failure(
    d: f64,
    radius: f64,
    cap: f64,
    sigma: f64,
    delta: f64,
    dim: usize,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let e = montecarlo::estimate_ball_failure(d, radius, cap, sigma, delta, dim, trials, seed)
        .map_err(err)?;
    Ok((e.mean, e.stderr))
}

#[pymodule]
fn urq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(quantize_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(consistency, m)?)?;
    m.add_function(wrap_pyfunction!(projected_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(projected_consistency_multibit, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_probability, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_probability_multibit, m)?)?;
    m.add_function(wrap_pyfunction!(consistency_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(norm_tail, m)?)?;
    m.add_function(wrap_pyfunction!(ball_failure_bound, m)?)?;
    m.add_function(wrap_pyfunction!(concrete_constants, m)?)?;
    m.add_function(wrap_pyfunction!(failure_bound, m)?)?;
    m.add_function(wrap_pyfunction!(guaranteed_distance, m)?)?;
    m.add_function(wrap_pyfunction!(rate_overhead, m)?)?;
    m.add_function(wrap_pyfunction!(required_measurements, m)?)?;
    m.add_function(wrap_pyfunction!(plan_unit_ball, m)?)?;
    m.add_function(wrap_pyfunction!(plan_sparse, m)?)?;
    m.add_function(wrap_pyfunction!(plan_union, m)?)?;
    m.add_function(wrap_pyfunction!(plan_similar, m)?)?;
    m.add_function(wrap_pyfunction!(mc_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(mc_norm_tail, m)?)?;
    m.add_function(wrap_pyfunction!(mc_ball_failure, m)?)?;
    Ok(())
}
