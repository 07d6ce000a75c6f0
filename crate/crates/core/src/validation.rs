//! Route-equality validation: the closed-form production formulas against
//! the numeric response-type programs, on randomly drawn distributions.
//!
//! Exact rational inputs make the comparison an equality, so any reported
//! discrepancy is a bug (or an injected perturbation in the sentinel test),
//! not roundoff.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    constructive_bounds, lp_intervals_batch, monotone_bounds_opt, BoundOptions, Endpoint,
    Estimand, Figure, Interval, MMonotone, ScenarioSpec, UMonotone,
};
use crate::observed::{estimate_observed, ObservedDistribution, TrialRecord};
use crate::par;
use crate::rat::{rat_from_f64, rat_to_f64, Rat};

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub trials: usize,
    pub seed: u64,
    /// Test hook: shift every closed-form endpoint by this amount so the
    /// comparison machinery itself can be exercised.
    pub perturb_closed_form: Option<f64>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            trials: 1000,
            seed: 20_240_901,
            perturb_closed_form: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub max_abs_discrepancy: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Random exact distribution from positive integer cell counts.
pub fn random_observed(rng: &mut ChaCha8Rng, with_event_block: bool) -> ObservedDistribution {
    let mut records = Vec::new();
    for a in 0..2u8 {
        let event_levels: &[Option<u8>] = if with_event_block {
            &[Some(0), Some(1)]
        } else {
            &[None]
        };
        for &event in event_levels {
            for y in 0..2u8 {
                for b in 0..2u8 {
                    let weight = rng.gen_range(1..=50u64);
                    records.push(TrialRecord::new(a, b, event, y).with_weight(weight));
                }
            }
        }
    }
    estimate_observed(&records).expect("counts are positive")
}

fn endpoint_gap(a: &Endpoint, b: &Endpoint) -> f64 {
    match (a, b) {
        (Endpoint::NegInf, Endpoint::NegInf) => 0.0,
        (Endpoint::Finite(x), Endpoint::Finite(y)) => rat_to_f64(&(x - y)).abs(),
        _ => f64::INFINITY,
    }
}

fn interval_gap(a: &Interval, b: &Interval, perturb: Option<f64>) -> f64 {
    let shift = perturb.and_then(rat_from_f64).unwrap_or_else(Rat::zero);
    let lower_a = match &a.lower {
        Endpoint::NegInf => Endpoint::NegInf,
        Endpoint::Finite(v) => Endpoint::Finite(v + &shift),
    };
    let upper_gap = rat_to_f64(&(&a.upper + &shift - &b.upper)).abs();
    endpoint_gap(&lower_a, &b.lower).max(upper_gap)
}

struct Check {
    name: &'static str,
    with_event_block: bool,
    scenario_pairs: Vec<(ScenarioSpec, ScenarioSpec)>,
    kind: CheckKind,
}

enum CheckKind {
    /// Closed form vs numeric programs, first scenario only.
    ClosedVsNumeric,
    /// Closed form vs the constructive decomposition, first scenario only.
    ClosedVsConstructive,
    /// Interval of scenario 1 must nest inside interval of scenario 2.
    Nesting,
}

/// Run the route-equality and nesting suite.
pub fn run(options: &ValidationOptions) -> ValidationReport {
    run_filtered(options, &[])
}

/// Run a subset of the checks by name; an empty filter runs everything.
pub fn run_filtered(options: &ValidationOptions, only: &[&str]) -> ValidationReport {
    let fig2 = ScenarioSpec::new(Figure::Fig2);
    let fig3a = ScenarioSpec::new(Figure::Fig3a);
    let checks = vec![
        Check {
            name: "closed_vs_numeric_plain",
            with_event_block: false,
            scenario_pairs: vec![(fig2, fig2)],
            kind: CheckKind::ClosedVsNumeric,
        },
        Check {
            name: "closed_vs_constructive_plain",
            with_event_block: false,
            scenario_pairs: vec![(fig2, fig2)],
            kind: CheckKind::ClosedVsConstructive,
        },
        Check {
            name: "closed_vs_numeric_message_monotone",
            with_event_block: false,
            scenario_pairs: vec![
                (fig2.with_m(MMonotone::NonNeg), fig2),
                (fig2.with_m(MMonotone::NonPos), fig2),
            ],
            kind: CheckKind::ClosedVsNumeric,
        },
        Check {
            name: "closed_vs_numeric_event_stratified",
            with_event_block: true,
            scenario_pairs: vec![
                (fig3a, fig3a),
                (fig3a.with_m(MMonotone::NonNeg), fig3a),
            ],
            kind: CheckKind::ClosedVsNumeric,
        },
        Check {
            name: "event_stratified_nests_in_pooled",
            with_event_block: true,
            scenario_pairs: vec![(fig3a, fig2)],
            kind: CheckKind::Nesting,
        },
        Check {
            name: "two_sided_monotone_nests_in_one_sided",
            with_event_block: false,
            scenario_pairs: vec![(
                fig2.with_u(UMonotone::Concordant).with_m(MMonotone::NonNeg),
                fig2.with_u(UMonotone::Concordant),
            )],
            kind: CheckKind::Nesting,
        },
        Check {
            name: "event_stratified_monotone_nests_in_pooled_monotone",
            with_event_block: true,
            scenario_pairs: vec![(
                fig3a.with_u(UMonotone::Concordant).with_m(MMonotone::NonNeg),
                fig2.with_u(UMonotone::Concordant).with_m(MMonotone::NonNeg),
            )],
            kind: CheckKind::Nesting,
        },
    ];

    let estimands = [
        Estimand::Ve0,
        Estimand::Ve1,
        Estimand::VeT,
        Estimand::VeM0,
        Estimand::VeM1,
        Estimand::BehavioralDiff0,
        Estimand::BehavioralDiff1,
        Estimand::ImmunologicalDiff0,
        Estimand::ImmunologicalDiff1,
        Estimand::TotalDiff,
    ];
    let bound_options = BoundOptions::default();

    let mut report = ValidationReport { checks: Vec::new() };
    for check in checks {
        if !only.is_empty() && !only.contains(&check.name) {
            continue;
        }
        let worst_per_trial: Vec<f64> = par::map_indexed(options.trials, |trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                options.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let obs = random_observed(&mut rng, check.with_event_block);
            let mut worst: f64 = 0.0;
            for &(sc_a, sc_b) in &check.scenario_pairs {
                match check.kind {
                    CheckKind::ClosedVsNumeric => {
                        let closed = lp_intervals_batch(&obs, &sc_a, &bound_options, false);
                        let numeric = lp_intervals_batch(&obs, &sc_a, &bound_options, true);
                        if let (Ok(closed), Ok(numeric)) = (closed, numeric) {
                            for ((ec, c), (en, n)) in closed.iter().zip(numeric.iter()) {
                                debug_assert_eq!(ec, en);
                                worst =
                                    worst.max(interval_gap(c, n, options.perturb_closed_form));
                            }
                        }
                    }
                    CheckKind::ClosedVsConstructive => {
                        if let Ok(closed) = lp_intervals_batch(&obs, &sc_a, &bound_options, false)
                        {
                            for (estimand, c) in &closed {
                                if !matches!(
                                    estimand,
                                    Estimand::Ve0 | Estimand::Ve1 | Estimand::VeT
                                ) {
                                    continue;
                                }
                                if let Ok(k) = constructive_bounds(&obs, *estimand) {
                                    worst = worst
                                        .max(interval_gap(c, &k, options.perturb_closed_form));
                                }
                            }
                        }
                    }
                    CheckKind::Nesting => {
                        for &estimand in &estimands {
                            let inner = interval_for_scenario(&obs, &sc_a, estimand);
                            let outer = interval_for_scenario(&obs, &sc_b, estimand);
                            if let (Ok(inner), Ok(outer)) = (inner, outer) {
                                if inner.feasible
                                    && outer.feasible
                                    && !inner.is_subinterval_of(&outer)
                                {
                                    worst = f64::INFINITY;
                                }
                            }
                        }
                    }
                }
            }
            worst
        });
        let max_abs_discrepancy = worst_per_trial.into_iter().fold(0.0f64, f64::max);
        report.checks.push(CheckResult {
            name: check.name.to_string(),
            trials: options.trials,
            max_abs_discrepancy,
            pass: max_abs_discrepancy == 0.0,
        });
    }
    report
}

fn interval_for_scenario(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
) -> Result<Interval, crate::bounds::BoundsError> {
    if scenario.u_monotone == UMonotone::None {
        // The closed-form path; its agreement with the numeric programs is
        // established by the equality checks above.
        crate::bounds::lp_bounds_fast(obs, scenario, estimand, &BoundOptions::default())
    } else {
        monotone_bounds_opt(obs, scenario, estimand, &BoundOptions::default())
    }
}
