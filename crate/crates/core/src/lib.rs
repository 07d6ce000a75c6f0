//! Valid, sharp nonparametric bounds on vaccine-efficacy estimands from
//! two-arm trial data under broken blinding.
//!
//! When participants infer their assignment (for instance from adverse
//! events), the belief confounds outcome comparisons and the usual efficacy
//! contrasts stop being point identified. This crate computes interval
//! bounds instead: response-type linear programs and closed-form
//! monotonicity arguments, both exact in rational arithmetic, plus a
//! synthetic-trial simulator and percentile-bootstrap inference to exercise
//! the whole pipeline end to end.
//!
//! Modules map onto the pipeline: [`observed`] estimates the trial
//! probability model, [`response_types`] enumerates counterfactual types,
//! [`lp`] solves the small exact programs, [`bounds`] dispatches scenarios
//! to closed forms, [`simulate`] generates synthetic populations with full
//! potential-outcome tables, [`inference`] wraps the bootstrap, and
//! [`validation`] cross-checks the formula and program routes.

pub mod bounds;
pub mod inference;
pub mod lp;
pub mod observed;
pub mod par;
pub mod rat;
pub mod response_types;
pub mod simulate;
pub mod validation;

pub use bounds::{
    all_bounds, lp_bounds, monotone_bounds, AllBounds, BoundMethod, BoundsRecord, BoundsResult,
    Estimand, Figure, Interval, ScenarioSpec,
};
pub use observed::{estimate_observed, ObservedDistribution, TrialRecord};
