//! Property tests for the structural invariants that hold on every valid
//! input, not just the worked fixtures.

use proptest::prelude::*;

use vebounds::bounds::{
    lp_bounds_opt, monotone_bounds_opt, BoundOptions, BoundsRecord, Endpoint, Estimand, Figure,
    MMonotone, ScenarioSpec, UMonotone,
};
use vebounds::observed::{estimate_observed, TrialRecord};
use vebounds::rat::Rat;
use num_traits::One;

fn opts() -> BoundOptions {
    BoundOptions::default()
}

/// Strictly positive cell counts for both arms, with or without events.
fn count_records(counts: &[u64], with_event: bool) -> Vec<TrialRecord> {
    let mut out = Vec::new();
    let mut idx = 0;
    for a in 0..2u8 {
        let levels: &[Option<u8>] = if with_event { &[Some(0), Some(1)] } else { &[None] };
        for &event in levels {
            for y in 0..2u8 {
                for b in 0..2u8 {
                    out.push(TrialRecord::new(a, b, event, y).with_weight(counts[idx]));
                    idx += 1;
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Estimated probabilities are exact weighted frequencies: each arm sums
    /// to one and the event block mixes back to the joint block exactly.
    #[test]
    fn estimation_identities(counts in proptest::collection::vec(1u64..200, 16)) {
        let obs = estimate_observed(&count_records(&counts, true)).unwrap();
        for a in 0..2u8 {
            let mut sum = Rat::from_integer(0.into());
            for y in 0..2u8 {
                for b in 0..2u8 {
                    sum += obs.p_yb(y, b, a);
                    let mixed = obs.gamma(0, a).unwrap() * obs.p_yb_s(y, b, a, 0).unwrap()
                        + obs.gamma(1, a).unwrap() * obs.p_yb_s(y, b, a, 1).unwrap();
                    prop_assert_eq!(&mixed, obs.p_yb(y, b, a));
                }
            }
            prop_assert_eq!(sum, Rat::one());
        }
    }

    /// Every interval satisfies the feasibility contract and the ratio-scale
    /// upper cap, with or without sharpening assumptions.
    #[test]
    fn interval_contract(counts in proptest::collection::vec(1u64..100, 16)) {
        let obs = estimate_observed(&count_records(&counts, true)).unwrap();
        let scenarios = [
            ScenarioSpec::new(Figure::Fig2),
            ScenarioSpec::new(Figure::Fig2).with_m(MMonotone::NonNeg),
            ScenarioSpec::new(Figure::Fig3a),
            ScenarioSpec::new(Figure::Fig3a).with_m(MMonotone::NonNeg),
        ];
        for scenario in scenarios {
            for estimand in Estimand::ALL {
                if estimand == Estimand::VeMinus1 {
                    continue;
                }
                let interval = lp_bounds_opt(&obs, &scenario, estimand, &opts()).unwrap();
                let feasible = match &interval.lower {
                    Endpoint::NegInf => true,
                    Endpoint::Finite(l) => l <= &interval.upper,
                };
                prop_assert_eq!(interval.feasible, feasible);
                if estimand.is_ratio_scale() {
                    prop_assert!(interval.upper <= Rat::one());
                }
            }
        }
    }

    /// Monotone two-sided intervals nest in their one-sided versions, and
    /// imposing a zero set never widens an LP interval.
    #[test]
    fn sharpening_never_widens(counts in proptest::collection::vec(1u64..100, 8)) {
        let obs = estimate_observed(&count_records(&counts, false)).unwrap();
        let base = ScenarioSpec::new(Figure::Fig2);
        for estimand in Estimand::RATIO_CORE {
            let plain = lp_bounds_opt(&obs, &base, estimand, &opts()).unwrap();
            let sharp = lp_bounds_opt(
                &obs,
                &base.with_m(MMonotone::NonNeg),
                estimand,
                &opts(),
            )
            .unwrap();
            if sharp.feasible {
                prop_assert!(sharp.is_subinterval_of(&plain));
            }
            let one_sided = monotone_bounds_opt(
                &obs,
                &base.with_u(UMonotone::Concordant),
                estimand,
                &opts(),
            )
            .unwrap();
            let two_sided = monotone_bounds_opt(
                &obs,
                &base.with_u(UMonotone::Concordant).with_m(MMonotone::NonNeg),
                estimand,
                &opts(),
            )
            .unwrap();
            if two_sided.feasible {
                prop_assert!(two_sided.is_subinterval_of(&one_sided));
            }
        }
    }

    /// JSON round trip is lossless for the serialized record.
    #[test]
    fn record_round_trip(lower in proptest::option::of(-50.0f64..1.0), width in 0.0f64..2.0) {
        let upper = lower.unwrap_or(-1.0) + width;
        let record = BoundsRecord {
            estimand: Estimand::Ve0,
            method: vebounds::bounds::BoundMethod::Lp,
            figure: Figure::Fig2,
            m_monotone: MMonotone::None,
            u_monotone: UMonotone::None,
            a_monotone: vebounds::bounds::AMonotone::None,
            lower,
            upper,
            feasible: lower.map_or(true, |l| l <= upper),
            point_estimate: None,
            ci_lower: None,
            ci_upper: None,
        };
        let text = serde_json::to_string(&record).unwrap();
        let back: BoundsRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(record, back);
    }
}
