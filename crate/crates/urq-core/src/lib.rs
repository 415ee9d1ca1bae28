//! Randomized dithered scalar quantization with a non-monotonic (modulo)
//! quantizer.
//!
//! The acquisition model measures a signal against random Gaussian vectors,
//! adds uniform dither, and quantizes each scaled measurement independently
//! with `Q(v) = ceil(v) mod 2^B`. Because the quantization regions are
//! non-contiguous, code consistency between two signals depends only on their
//! distance, and the worst-case distance between consistent signals shrinks
//! exponentially in the number of measurements.
//!
//! The crate provides:
//!
//! - [`ensemble`]: the measurement/quantization pipeline itself;
//! - [`analytics`]: exact consistency probabilities, the closed-form bounds
//!   around them, ball-pair failure bounds, the guarantee constants, and
//!   covering-number rate planners for structured signal models;
//! - [`montecarlo`]: seeded simulation estimators that independently validate
//!   every analytic formula;
//! - [`reconstruct`]: a desk-scale brute-force consistent-reconstruction
//!   oracle and the error-decay experiment.
//!
//! ```
//! use urq_core::{analytics, MeasurementEnsemble, Signal};
//!
//! // Acquire two nearby signals with the same seeded ensemble.
//! let ensemble = MeasurementEnsemble::generate(64, 3, 1.0, 0.5, 1, 42)?;
//! let x = Signal::new(vec![0.30, -0.20, 0.10])?;
//! let x2 = Signal::new(vec![0.30, -0.18, 0.10])?;
//! let codes = (ensemble.quantize(&x)?, ensemble.quantize(&x2)?);
//! let observed = codes.0.consistency(&codes.1)?;
//!
//! // The exact per-measurement consistency probability at their distance.
//! let d = x.distance_to(&x2)?;
//! let p = analytics::consistency_probability(d, 1.0, 0.5)?;
//! assert!(p > 0.95 && observed.hamming <= 12);
//!
//! // How many one-bit measurements guarantee worst-case distance 0.25 over
//! // the unit ball, with failure probability 1e-3.
//! let constants = analytics::GuaranteeConstants::concrete(3)?;
//! let model = urq_core::SignalModel::unit_ball(3)?;
//! let plan = analytics::plan_rate(&model, 0.25, 1e-3, &constants)?;
//! assert!(plan.required_measurements > 0);
//! # Ok::<(), urq_core::Error>(())
//! ```

pub mod analytics;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod quantizer;
pub mod reconstruct;
mod rng;
pub mod signal;

pub use ensemble::{DeltaSpec, MeasurementEnsemble};
pub use error::{Error, Result};
pub use model::{SignalModel, SubspaceBasis};
pub use quantizer::{quantize_scalar, Consistency, QuantizedCode};
pub use signal::Signal;

#[cfg(test)]
mod tests {
    use super::*;

    // Everything is immutable after construction and every operation is a
    // pure function, so the types move freely across threads.
    #[test]
    fn autotraits() {
        fn has_autotraits<T: Send + Sync + Sized + Unpin>() {}
        has_autotraits::<Signal>();
        has_autotraits::<MeasurementEnsemble>();
        has_autotraits::<QuantizedCode>();
        has_autotraits::<SignalModel>();
        has_autotraits::<analytics::GuaranteeParams>();
        has_autotraits::<analytics::RatePlan>();
        has_autotraits::<montecarlo::McEstimate>();
        has_autotraits::<reconstruct::DecayReport>();
    }
}
