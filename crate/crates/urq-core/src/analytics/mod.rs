//! Closed-form probabilities, bounds, and rate planners.

mod bounds;
mod consistency;
mod planner;
mod special;

pub use bounds::{
    ball_failure_bound, failure_bound, guaranteed_distance, norm_tail, rate_overhead,
    required_measurements, FailureBound, GuaranteeConstants, GuaranteeParams,
};
pub use consistency::{
    consistency_bounds, consistency_probability, consistency_probability_multibit,
    consistency_probability_tol, projected_consistency, projected_consistency_multibit,
    ConsistencyBounds, SERIES_TOL,
};
pub use planner::{covering_log, plan_rate, RatePlan};
pub use special::{gamma_upper_regularized_half, ln_binomial, normal_interval, std_normal_cdf};
