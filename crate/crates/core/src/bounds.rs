//! Bound intervals for every vaccine-efficacy estimand, per causal scenario.
//!
//! Both routes reduce to ranges for the four mean potential outcomes
//! `E(Y^{a,m})`, `(a, m) ∈ {0,1}²`, which are then composed into ratio- or
//! difference-scale estimands by interval arithmetic:
//!
//! * the LP route derives each range from the response-type programs
//!   (closed forms here, with the numeric solver as an always-available
//!   cross-check), optionally sharpened by monotonicity zero sets and, when
//!   the adverse-event indicator is exploitable, tightened by intersecting
//!   the per-stratum ranges;
//! * the monotone route derives the ranges from expectation-level
//!   monotonicity inequalities instead.
//!
//! Composition is exact in rationals. An empty interval (lower above upper)
//! is not an error: it is the empirical signature of a violated assumption
//! and is reported through the `feasible` flag.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, Condition, LpError, Sense};
use crate::observed::{check_positivity, ObservedDistribution, PositivityViolation};
use crate::rat::{rat_to_f64, Rat};
use crate::response_types::{enumerate_types, zero_set, Message, MonotoneTag, TypeSet};

// ----- scenario --------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
}

impl Figure {
    /// Whether event stratification can sharpen the bounds.
    pub fn event_sharpens(&self) -> bool {
        matches!(self, Figure::Fig3a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MMonotone {
    None,
    NonNeg,
    NonPos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UMonotone {
    None,
    Concordant,
    Discordant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AMonotone {
    None,
    NonNeg,
    NonPos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub figure: Figure,
    pub m_monotone: MMonotone,
    pub u_monotone: UMonotone,
    pub a_monotone: AMonotone,
}

impl ScenarioSpec {
    pub fn new(figure: Figure) -> Self {
        ScenarioSpec {
            figure,
            m_monotone: MMonotone::None,
            u_monotone: UMonotone::None,
            a_monotone: AMonotone::None,
        }
    }

    pub fn with_m(mut self, m: MMonotone) -> Self {
        self.m_monotone = m;
        self
    }

    pub fn with_u(mut self, u: UMonotone) -> Self {
        self.u_monotone = u;
        self
    }

    pub fn with_a(mut self, a: AMonotone) -> Self {
        self.a_monotone = a;
        self
    }

    /// Reject direction pairings with no supporting result: the concordant
    /// U direction pairs with a non-negative message effect, the discordant
    /// direction with a non-positive one.
    pub fn validate(&self) -> Result<(), BoundsError> {
        match (self.u_monotone, self.m_monotone) {
            (UMonotone::Concordant, MMonotone::NonPos)
            | (UMonotone::Discordant, MMonotone::NonNeg) => {
                Err(BoundsError::MismatchedMonotonicity)
            }
            _ => Ok(()),
        }
    }

    /// Zero set induced by the individual-level monotonicity assumptions.
    pub fn zero_types(&self) -> TypeSet {
        let mut set = TypeSet::EMPTY;
        match self.m_monotone {
            MMonotone::NonNeg => set = set.union(zero_set(MonotoneTag::MNonNeg).indices),
            MMonotone::NonPos => set = set.union(zero_set(MonotoneTag::MNonPos).indices),
            MMonotone::None => {}
        }
        match self.a_monotone {
            AMonotone::NonNeg => set = set.union(zero_set(MonotoneTag::ANonNeg).indices),
            AMonotone::NonPos => set = set.union(zero_set(MonotoneTag::ANonPos).indices),
            AMonotone::None => {}
        }
        set
    }
}

// ----- estimands --------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimand {
    VeMinus1,
    Ve0,
    Ve1,
    VeT,
    VeM0,
    VeM1,
    BehavioralDiff0,
    BehavioralDiff1,
    ImmunologicalDiff0,
    ImmunologicalDiff1,
    TotalDiff,
}

impl Estimand {
    pub const ALL: [Estimand; 11] = [
        Estimand::VeMinus1,
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

    pub const RATIO_CORE: [Estimand; 3] = [Estimand::Ve0, Estimand::Ve1, Estimand::VeT];

    /// The contrast in terms of the mean potential outcomes.
    fn contrast(&self) -> Option<Contrast> {
        use Estimand::*;
        Some(match self {
            VeMinus1 => return None,
            Ve0 => Contrast::Ratio {
                num: (1, 0),
                den: (0, 0),
            },
            Ve1 => Contrast::Ratio {
                num: (1, 1),
                den: (0, 1),
            },
            VeT => Contrast::Ratio {
                num: (1, 1),
                den: (0, 0),
            },
            VeM0 => Contrast::Ratio {
                num: (0, 1),
                den: (0, 0),
            },
            VeM1 => Contrast::Ratio {
                num: (1, 1),
                den: (1, 0),
            },
            BehavioralDiff0 => Contrast::Diff {
                plus: (0, 1),
                minus: (0, 0),
            },
            BehavioralDiff1 => Contrast::Diff {
                plus: (1, 1),
                minus: (1, 0),
            },
            ImmunologicalDiff0 => Contrast::Diff {
                plus: (1, 0),
                minus: (0, 0),
            },
            ImmunologicalDiff1 => Contrast::Diff {
                plus: (1, 1),
                minus: (0, 1),
            },
            TotalDiff => Contrast::Diff {
                plus: (1, 1),
                minus: (0, 0),
            },
        })
    }

    pub fn is_ratio_scale(&self) -> bool {
        matches!(self.contrast(), Some(Contrast::Ratio { .. }) | None)
    }
}

/// `Ratio`: `1 - E(Y^{num}) / E(Y^{den})`. `Diff`: `E(Y^{plus}) - E(Y^{minus})`.
enum Contrast {
    Ratio { num: (u8, u8), den: (u8, u8) },
    Diff { plus: (u8, u8), minus: (u8, u8) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Lp,
    Monotone,
    Point,
}

// ----- intervals --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Endpoint {
    NegInf,
    Finite(Rat),
}

impl Endpoint {
    pub fn as_f64(&self) -> f64 {
        match self {
            Endpoint::NegInf => f64::NEG_INFINITY,
            Endpoint::Finite(v) => rat_to_f64(v),
        }
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Endpoint::NegInf => None,
            Endpoint::Finite(v) => Some(v),
        }
    }

    fn le(&self, other: &Rat) -> bool {
        match self {
            Endpoint::NegInf => true,
            Endpoint::Finite(v) => v <= other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lower: Endpoint,
    pub upper: Rat,
    pub feasible: bool,
    pub method: BoundMethod,
}

impl Interval {
    fn new(lower: Endpoint, upper: Rat, method: BoundMethod) -> Self {
        let feasible = lower.le(&upper);
        Interval {
            lower,
            upper,
            feasible,
            method,
        }
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower.as_f64()
    }

    pub fn upper_f64(&self) -> f64 {
        rat_to_f64(&self.upper)
    }

    /// Whether `self` is contained in `other` (both feasible).
    pub fn is_subinterval_of(&self, other: &Interval) -> bool {
        let lower_ok = match (&self.lower, &other.lower) {
            (_, Endpoint::NegInf) => true,
            (Endpoint::NegInf, Endpoint::Finite(_)) => false,
            (Endpoint::Finite(a), Endpoint::Finite(b)) => a >= b,
        };
        lower_ok && self.upper <= other.upper
    }
}

// ----- errors ------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("positivity violated: {}", format_violations(.0))]
    Positivity(Vec<PositivityViolation>),
    #[error("scenario pairs a U-monotonicity direction with the wrong message direction")]
    MismatchedMonotonicity,
    #[error("monotone bounds require a U-monotonicity direction")]
    MissingUMonotonicity,
    #[error("estimand {0:?} is not produced by this method")]
    UnsupportedEstimand(Estimand),
    #[error("event-stratified scenario requires adverse-event data")]
    MissingEventData,
    #[error("no event stratum satisfies positivity in arm {0}")]
    NoUsableStratum(u8),
    #[error("denominator expectation is identically zero for {0:?}")]
    ZeroDenominator(Estimand),
    #[error("lp: {0}")]
    Lp(#[from] LpError),
}

fn format_violations(violations: &[PositivityViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BoundOptions {
    /// Skip event strata that fail positivity when intersecting per-stratum
    /// ranges instead of failing hard.
    pub allow_empty_stratum: bool,
}

// ----- expectation ranges -------------------------------------------------------

/// Closed range for a mean potential outcome; `lo > hi` encodes an empty
/// intersection (assumption violation).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationRange {
    pub lo: Rat,
    pub hi: Rat,
}

impl ExpectationRange {
    fn intersect(self, other: ExpectationRange) -> ExpectationRange {
        ExpectationRange {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

/// Stratum-level range of `E(Y^{a,m} | A=a, B=b[, S=s])` implied by the
/// response-type program: the blinded-column mass is pinned, the remaining
/// mass is free, and a zero set restricts where either may sit.
fn stratum_range(a: u8, b: u8, m: u8, p1: &Rat, zero: TypeSet) -> Result<(Rat, Rat), BoundsError> {
    let table = enumerate_types(b);
    let kept = zero.complement();
    let constraint = table.q_set(a, Message::Blinded).intersect(kept);
    let free = kept.minus(constraint);
    let objective = table.q_set(a, Message::Told(m)).intersect(kept);

    let p0 = Rat::one() - p1;
    if (!p1.is_zero() && constraint.is_empty()) || (!p0.is_zero() && free.is_empty()) {
        return Err(BoundsError::Lp(LpError::Infeasible));
    }

    let mut hi = Rat::zero();
    if !constraint.intersect(objective).is_empty() {
        hi += p1;
    }
    if !free.intersect(objective).is_empty() {
        hi += &p0;
    }
    let mut lo = Rat::zero();
    if !constraint.is_empty() && constraint.is_subset_of(objective) {
        lo += p1;
    }
    if !free.is_empty() && free.is_subset_of(objective) {
        lo += &p0;
    }
    Ok((lo, hi))
}

/// LP-route range of `E(Y^{a,m})` without event stratification.
fn lp_range_pooled(
    obs: &ObservedDistribution,
    a: u8,
    m: u8,
    zero: TypeSet,
) -> Result<ExpectationRange, BoundsError> {
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for b in 0..2u8 {
        let pi = obs.pi(b, a);
        if pi.is_zero() {
            return Err(BoundsError::Positivity(vec![
                PositivityViolation::BeliefCellEmpty { b, a },
            ]));
        }
        let p1 = obs.p_cond(1, a, b).expect("pi > 0");
        let (slo, shi) = stratum_range(a, b, m, &p1, zero)?;
        lo += &pi * slo;
        hi += &pi * shi;
    }
    Ok(ExpectationRange { lo, hi })
}

/// Event strata of one arm that satisfy positivity.
fn usable_strata(
    obs: &ObservedDistribution,
    a: u8,
    options: &BoundOptions,
) -> Result<Vec<u8>, BoundsError> {
    let mut usable = Vec::new();
    let mut violations = Vec::new();
    for s in 0..2u8 {
        let gamma_ok = obs.gamma(s, a).map_or(false, |g| !g.is_zero());
        if !gamma_ok {
            violations.push(PositivityViolation::EventCellEmpty { s, a });
            continue;
        }
        let mut stratum_ok = true;
        for b in 0..2u8 {
            if obs.pi_s(b, a, s).map_or(true, |p| p.is_zero()) {
                violations.push(PositivityViolation::BeliefEventCellEmpty { b, a, s });
                stratum_ok = false;
            }
        }
        if stratum_ok {
            usable.push(s);
        }
    }
    if !options.allow_empty_stratum && !violations.is_empty() {
        return Err(BoundsError::Positivity(violations));
    }
    if usable.is_empty() {
        return Err(BoundsError::NoUsableStratum(a));
    }
    Ok(usable)
}

/// LP-route range of `E(Y^{a,m})` with event stratification: the range is
/// valid within every usable stratum, so the per-stratum ranges intersect.
fn lp_range_stratified(
    obs: &ObservedDistribution,
    a: u8,
    m: u8,
    zero: TypeSet,
    options: &BoundOptions,
) -> Result<ExpectationRange, BoundsError> {
    if !obs.has_s_block() {
        return Err(BoundsError::MissingEventData);
    }
    let mut combined: Option<ExpectationRange> = None;
    for s in usable_strata(obs, a, options)? {
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        for b in 0..2u8 {
            let pi = obs.pi_s(b, a, s).expect("s block present");
            let p1 = obs.p_cond_s(1, a, b, s).expect("pi_s > 0 for usable strata");
            let (slo, shi) = stratum_range(a, b, m, &p1, zero)?;
            lo += &pi * slo;
            hi += &pi * shi;
        }
        let range = ExpectationRange { lo, hi };
        combined = Some(match combined {
            None => range,
            Some(acc) => acc.intersect(range),
        });
    }
    Ok(combined.expect("at least one usable stratum"))
}

fn lp_range(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    a: u8,
    m: u8,
    options: &BoundOptions,
) -> Result<ExpectationRange, BoundsError> {
    let zero = scenario.zero_types();
    if scenario.figure.event_sharpens() {
        lp_range_stratified(obs, a, m, zero, options)
    } else {
        lp_range_pooled(obs, a, m, zero)
    }
}

/// Monotone-route range of `E(Y^{a,m})` from the expectation-level
/// inequalities. The concordant direction caps the believed-vaccinated cell
/// from above and the believed-unvaccinated cell from below; the discordant
/// direction reverses both; a message direction inserts the blinded-arm mean
/// as the matching endpoint.
fn monotone_range(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    a: u8,
    m: u8,
    options: &BoundOptions,
) -> Result<ExpectationRange, BoundsError> {
    // Tightest conditional available for belief cell b: plain p_{1.ab}, or
    // the min/max over usable event strata when stratification sharpens.
    let cell = |b: u8, want_min: bool| -> Result<Rat, BoundsError> {
        if scenario.figure.event_sharpens() {
            if !obs.has_s_block() {
                return Err(BoundsError::MissingEventData);
            }
            let strata = usable_strata(obs, a, options)?;
            let mut best: Option<Rat> = None;
            for s in strata {
                let v = obs.p_cond_s(1, a, b, s).expect("usable stratum");
                best = Some(match best {
                    None => v,
                    Some(acc) => {
                        if want_min {
                            acc.min(v)
                        } else {
                            acc.max(v)
                        }
                    }
                });
            }
            Ok(best.expect("nonempty strata"))
        } else {
            let pi = obs.pi(b, a);
            if pi.is_zero() {
                return Err(BoundsError::Positivity(vec![
                    PositivityViolation::BeliefCellEmpty { b, a },
                ]));
            }
            Ok(obs.p_cond(1, a, b).expect("pi > 0"))
        }
    };

    let blinded_mean = obs.p1(a);
    let (lo, hi) = match (scenario.u_monotone, m) {
        (UMonotone::Concordant, 1) => {
            let hi = cell(1, true)?;
            let lo = match scenario.m_monotone {
                MMonotone::NonNeg => blinded_mean,
                _ => Rat::zero(),
            };
            (lo, hi)
        }
        (UMonotone::Concordant, _) => {
            let lo = cell(0, false)?;
            let hi = match scenario.m_monotone {
                MMonotone::NonNeg => blinded_mean,
                _ => Rat::one(),
            };
            (lo, hi)
        }
        (UMonotone::Discordant, 1) => {
            let lo = cell(1, false)?;
            let hi = match scenario.m_monotone {
                MMonotone::NonPos => blinded_mean,
                _ => Rat::one(),
            };
            (lo, hi)
        }
        (UMonotone::Discordant, _) => {
            let hi = cell(0, true)?;
            let lo = match scenario.m_monotone {
                MMonotone::NonPos => blinded_mean,
                _ => Rat::zero(),
            };
            (lo, hi)
        }
        (UMonotone::None, _) => return Err(BoundsError::MissingUMonotonicity),
    };
    Ok(ExpectationRange { lo, hi })
}

// ----- composition ---------------------------------------------------------------

fn compose(
    estimand: Estimand,
    method: BoundMethod,
    num: ExpectationRange,
    den_or_minus: ExpectationRange,
    is_ratio: bool,
) -> Result<Interval, BoundsError> {
    if is_ratio {
        let den = den_or_minus;
        if den.hi.is_zero() {
            return Err(BoundsError::ZeroDenominator(estimand));
        }
        let upper = Rat::one() - &num.lo / &den.hi;
        let lower = if den.lo.is_zero() {
            if num.hi.is_zero() {
                Endpoint::Finite(Rat::one())
            } else {
                Endpoint::NegInf
            }
        } else {
            Endpoint::Finite(Rat::one() - &num.hi / &den.lo)
        };
        Ok(Interval::new(lower, upper, method))
    } else {
        let minus = den_or_minus;
        let lower = Endpoint::Finite(&num.lo - &minus.hi);
        let upper = &num.hi - &minus.lo;
        Ok(Interval::new(lower, upper, method))
    }
}

fn bounds_from_ranges<F>(
    estimand: Estimand,
    method: BoundMethod,
    mut range_of: F,
) -> Result<Interval, BoundsError>
where
    F: FnMut(u8, u8) -> Result<ExpectationRange, BoundsError>,
{
    match estimand.contrast() {
        None => Err(BoundsError::UnsupportedEstimand(estimand)),
        Some(Contrast::Ratio { num, den }) => {
            let num_r = range_of(num.0, num.1)?;
            let den_r = range_of(den.0, den.1)?;
            compose(estimand, method, num_r, den_r, true)
        }
        Some(Contrast::Diff { plus, minus }) => {
            let plus_r = range_of(plus.0, plus.1)?;
            let minus_r = range_of(minus.0, minus.1)?;
            compose(estimand, method, plus_r, minus_r, false)
        }
    }
}

// ----- public operations -----------------------------------------------------------

fn ensure_positivity(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    options: &BoundOptions,
) -> Result<(), BoundsError> {
    let violations = check_positivity(obs, scenario);
    let fatal: Vec<PositivityViolation> = violations
        .into_iter()
        .filter(|v| {
            if options.allow_empty_stratum {
                matches!(
                    v,
                    PositivityViolation::BeliefCellEmpty { .. }
                        | PositivityViolation::MissingEventData
                )
            } else {
                true
            }
        })
        .collect();
    if fatal.is_empty() {
        Ok(())
    } else {
        Err(BoundsError::Positivity(fatal))
    }
}

/// LP-route interval for one estimand (closed forms; cross-checked against
/// the numeric solver in debug builds).
pub fn lp_bounds(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
) -> Result<Interval, BoundsError> {
    lp_bounds_opt(obs, scenario, estimand, &BoundOptions::default())
}

pub fn lp_bounds_opt(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
    options: &BoundOptions,
) -> Result<Interval, BoundsError> {
    let interval = lp_bounds_fast(obs, scenario, estimand, options)?;
    #[cfg(debug_assertions)]
    {
        if let Ok(numeric) = lp_bounds_numeric_opt(obs, scenario, estimand, options) {
            debug_assert_eq!(
                interval, numeric,
                "closed-form and numeric LP routes disagree for {estimand:?}"
            );
        }
    }
    Ok(interval)
}

/// Closed-form path without the debug cross-check; used by resampling loops
/// that re-verify once per dataset rather than once per replicate.
pub(crate) fn lp_bounds_fast(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
    options: &BoundOptions,
) -> Result<Interval, BoundsError> {
    scenario.validate()?;
    ensure_positivity(obs, scenario, options)?;
    bounds_from_ranges(estimand, BoundMethod::Lp, |a, m| {
        lp_range(obs, scenario, a, m, options)
    })
}

/// Numeric-LP route: assemble and solve the response-type programs with the
/// exact simplex, intersecting per-stratum solutions where applicable. Kept
/// deliberately independent of the closed forms.
pub fn lp_bounds_numeric(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
) -> Result<Interval, BoundsError> {
    lp_bounds_numeric_opt(obs, scenario, estimand, &BoundOptions::default())
}

pub fn lp_bounds_numeric_opt(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
    options: &BoundOptions,
) -> Result<Interval, BoundsError> {
    scenario.validate()?;
    ensure_positivity(obs, scenario, options)?;
    let zero = scenario.zero_types();

    // The message effects share an arm, so in the pooled setting the numeric
    // route runs the ratio programs rather than composing the
    // per-expectation rectangles; the two agree because the pinned cells
    // decouple the numerator's free mass from the denominator's. Under event
    // stratification the sharp interval intersects the per-stratum
    // expectation ranges before composing, so the generic path applies (the
    // per-stratum ratio programs would only bound each stratum's interval).
    match estimand {
        Estimand::VeM0 | Estimand::VeM1 if !scenario.figure.event_sharpens() => {
            vem_pooled_ratio_interval(obs, estimand, zero)
        }
        _ => bounds_from_ranges(estimand, BoundMethod::Lp, |a, m| {
            numeric_range(obs, scenario, a, m, zero, options)
        }),
    }
}

/// Per-stratum ratio-program interval for a message effect under the
/// event-sharpening figure; valid (every stratum bounds the same target) but
/// generally wider than the intersect-then-compose interval. Exposed for the
/// containment cross-check.
pub fn vem_stratumwise_ratio_interval(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
    options: &BoundOptions,
) -> Result<Interval, BoundsError> {
    let arm = match estimand {
        Estimand::VeM0 => 0,
        Estimand::VeM1 => 1,
        other => return Err(BoundsError::UnsupportedEstimand(other)),
    };
    if !obs.has_s_block() {
        return Err(BoundsError::MissingEventData);
    }
    let zero = scenario.zero_types();
    let mut best: Option<(Endpoint, Rat)> = None;
    for s in usable_strata(obs, arm, options)? {
        let program = lp::build_vem_ratio(obs, arm, Some(zero), Some(s))?;
        let hi = Rat::one() - lp::ratio_minimum_allowing_zero_boundary(&program)?;
        let lo = match lp::bound_ratio(&program, Sense::Max) {
            Ok(v) => Endpoint::Finite(Rat::one() - v),
            Err(LpError::DegenerateDenominator) => Endpoint::NegInf,
            Err(e) => return Err(e.into()),
        };
        best = Some(match best {
            None => (lo, hi),
            Some((alo, ahi)) => {
                let lo = match (alo, lo) {
                    (Endpoint::NegInf, x) | (x, Endpoint::NegInf) => x,
                    (Endpoint::Finite(a), Endpoint::Finite(b)) => Endpoint::Finite(a.max(b)),
                };
                (lo, ahi.min(hi))
            }
        });
    }
    let (lower, upper) = best.expect("at least one usable stratum");
    Ok(Interval::new(lower, upper, BoundMethod::Lp))
}

/// All interval estimands computed from one set of expectation ranges; the
/// ranges are evaluated once per `(arm, message)` instead of once per
/// estimand. The batch spans every estimand except the blinded point value.
pub(crate) fn lp_intervals_batch(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    options: &BoundOptions,
    numeric: bool,
) -> Result<Vec<(Estimand, Interval)>, BoundsError> {
    scenario.validate()?;
    ensure_positivity(obs, scenario, options)?;
    let zero = scenario.zero_types();

    let mut ranges: [[Option<ExpectationRange>; 2]; 2] = Default::default();
    for a in 0..2u8 {
        for m in 0..2u8 {
            let range = if numeric {
                numeric_range(obs, scenario, a, m, zero, options)?
            } else {
                lp_range(obs, scenario, a, m, options)?
            };
            ranges[a as usize][m as usize] = Some(range);
        }
    }
    let range_of = |a: u8, m: u8| -> Result<ExpectationRange, BoundsError> {
        Ok(ranges[a as usize][m as usize].clone().expect("precomputed"))
    };

    let mut out = Vec::new();
    for &estimand in &Estimand::ALL {
        if estimand == Estimand::VeMinus1 {
            continue;
        }
        let interval = if numeric
            && matches!(estimand, Estimand::VeM0 | Estimand::VeM1)
            && !scenario.figure.event_sharpens()
        {
            vem_pooled_ratio_interval(obs, estimand, zero)?
        } else {
            bounds_from_ranges(estimand, BoundMethod::Lp, |a, m| range_of(a, m))?
        };
        out.push((estimand, interval));
    }
    Ok(out)
}

fn vem_pooled_ratio_interval(
    obs: &ObservedDistribution,
    estimand: Estimand,
    zero: TypeSet,
) -> Result<Interval, BoundsError> {
    let arm = if estimand == Estimand::VeM1 { 1 } else { 0 };
    let program = lp::build_vem_ratio(obs, arm, Some(zero), None)?;
    let upper = Rat::one() - lp::ratio_minimum_allowing_zero_boundary(&program)?;
    let lower = match lp::bound_ratio(&program, Sense::Max) {
        Ok(v) => Endpoint::Finite(Rat::one() - v),
        Err(LpError::DegenerateDenominator) => Endpoint::NegInf,
        Err(e) => return Err(e.into()),
    };
    Ok(Interval::new(lower, upper, BoundMethod::Lp))
}

/// Numeric range of one mean potential outcome via the simplex programs.
fn numeric_range(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    a: u8,
    m: u8,
    zero: TypeSet,
    options: &BoundOptions,
) -> Result<ExpectationRange, BoundsError> {
    if scenario.figure.event_sharpens() {
        if !obs.has_s_block() {
            return Err(BoundsError::MissingEventData);
        }
        let mut combined: Option<ExpectationRange> = None;
        for s in usable_strata(obs, a, options)? {
            let mut lo = Rat::zero();
            let mut hi = Rat::zero();
            for b in 0..2u8 {
                let pi = obs.pi_s(b, a, s).expect("s block present");
                let condition = Condition::ArmEventBelief { a, s, b };
                let (slo, shi) =
                    lp::bound_expectation(obs, condition, (a, Message::Told(m)), Some(zero))?;
                lo += &pi * slo;
                hi += &pi * shi;
            }
            let range = ExpectationRange { lo, hi };
            combined = Some(match combined {
                None => range,
                Some(acc) => acc.intersect(range),
            });
        }
        Ok(combined.expect("at least one usable stratum"))
    } else {
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        for b in 0..2u8 {
            let pi = obs.pi(b, a);
            if pi.is_zero() {
                return Err(BoundsError::Positivity(vec![
                    PositivityViolation::BeliefCellEmpty { b, a },
                ]));
            }
            let condition = Condition::ArmBelief { a, b };
            let (slo, shi) =
                lp::bound_expectation(obs, condition, (a, Message::Told(m)), Some(zero))?;
            lo += &pi * slo;
            hi += &pi * shi;
        }
        Ok(ExpectationRange { lo, hi })
    }
}

/// Monotonicity-route interval for one estimand.
pub fn monotone_bounds(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
) -> Result<Interval, BoundsError> {
    monotone_bounds_opt(obs, scenario, estimand, &BoundOptions::default())
}

pub fn monotone_bounds_opt(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
    options: &BoundOptions,
) -> Result<Interval, BoundsError> {
    scenario.validate()?;
    if scenario.u_monotone == UMonotone::None {
        return Err(BoundsError::MissingUMonotonicity);
    }
    ensure_positivity(obs, scenario, options)?;
    bounds_from_ranges(estimand, BoundMethod::Monotone, |a, m| {
        monotone_range(obs, scenario, a, m, options)
    })
}

/// Constructive route: decompose each mean into an identified cell plus a
/// unit-bounded remainder (no optimizer). Exactly reproduces the LP-route
/// intervals in the unsharpened, unstratified setting.
pub fn constructive_bounds(
    obs: &ObservedDistribution,
    estimand: Estimand,
) -> Result<Interval, BoundsError> {
    let scenario = ScenarioSpec::new(Figure::Fig2);
    ensure_positivity(obs, &scenario, &BoundOptions::default())?;
    if !matches!(estimand, Estimand::Ve0 | Estimand::Ve1 | Estimand::VeT) {
        return Err(BoundsError::UnsupportedEstimand(estimand));
    }
    let range = |a: u8, m: u8| -> Result<ExpectationRange, BoundsError> {
        let pi_m = obs.pi(m, a);
        let pi_other = obs.pi(1 - m, a);
        let identified = obs
            .p_cond(1, a, m)
            .ok_or_else(|| BoundsError::Positivity(vec![PositivityViolation::BeliefCellEmpty { b: m, a }]))?;
        let lo = &pi_m * identified;
        let hi = &lo + pi_other;
        Ok(ExpectationRange { lo, hi })
    };
    bounds_from_ranges(estimand, BoundMethod::Lp, |a, m| range(a, m))
}

/// The blinded-trial contrast, reported as a point value for orientation.
pub fn blinded_point_value(obs: &ObservedDistribution) -> Result<Rat, BoundsError> {
    let denominator = obs.p1(0);
    if denominator.is_zero() {
        return Err(BoundsError::ZeroDenominator(Estimand::VeMinus1));
    }
    Ok(Rat::one() - obs.p1(1) / denominator)
}

// ----- batch wrapper -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsResult {
    pub estimand: Estimand,
    pub method: BoundMethod,
    pub figure: Figure,
    pub m_monotone: MMonotone,
    pub u_monotone: UMonotone,
    pub a_monotone: AMonotone,
    pub lower: Endpoint,
    pub upper: Rat,
    pub feasible: bool,
    pub point_estimate: Option<Rat>,
    pub ci_lower: Option<(f64, f64)>,
    pub ci_upper: Option<(f64, f64)>,
}

impl BoundsResult {
    pub fn lower_f64(&self) -> f64 {
        self.lower.as_f64()
    }

    pub fn upper_f64(&self) -> f64 {
        rat_to_f64(&self.upper)
    }

    pub fn from_interval(estimand: Estimand, scenario: &ScenarioSpec, interval: Interval) -> Self {
        BoundsResult {
            estimand,
            method: interval.method,
            figure: scenario.figure,
            m_monotone: scenario.m_monotone,
            u_monotone: scenario.u_monotone,
            a_monotone: scenario.a_monotone,
            feasible: interval.feasible,
            lower: interval.lower,
            upper: interval.upper,
            point_estimate: None,
            ci_lower: None,
            ci_upper: None,
        }
    }
}

#[derive(Debug)]
pub struct FailedBound {
    pub estimand: Estimand,
    pub method: BoundMethod,
    pub error: BoundsError,
}

#[derive(Debug, Default)]
pub struct AllBounds {
    pub results: Vec<BoundsResult>,
    pub failures: Vec<FailedBound>,
}

impl AllBounds {
    pub fn get(&self, estimand: Estimand, method: BoundMethod) -> Option<&BoundsResult> {
        self.results
            .iter()
            .find(|r| r.estimand == estimand && r.method == method)
    }
}

/// Compute every supported estimand by every applicable method. Failures are
/// collected per estimand instead of aborting the batch.
pub fn all_bounds(obs: &ObservedDistribution, scenario: &ScenarioSpec) -> AllBounds {
    all_bounds_opt(obs, scenario, &BoundOptions::default())
}

pub fn all_bounds_opt(
    obs: &ObservedDistribution,
    scenario: &ScenarioSpec,
    options: &BoundOptions,
) -> AllBounds {
    let mut out = AllBounds::default();

    match blinded_point_value(obs) {
        Ok(v) => {
            let interval = Interval::new(Endpoint::Finite(v.clone()), v.clone(), BoundMethod::Point);
            let mut result = BoundsResult::from_interval(Estimand::VeMinus1, scenario, interval);
            result.point_estimate = Some(v);
            out.results.push(result);
        }
        Err(error) => out.failures.push(FailedBound {
            estimand: Estimand::VeMinus1,
            method: BoundMethod::Point,
            error,
        }),
    }

    for &estimand in &Estimand::ALL {
        if estimand == Estimand::VeMinus1 {
            continue;
        }
        match lp_bounds_opt(obs, scenario, estimand, options) {
            Ok(interval) => out
                .results
                .push(BoundsResult::from_interval(estimand, scenario, interval)),
            Err(error) => out.failures.push(FailedBound {
                estimand,
                method: BoundMethod::Lp,
                error,
            }),
        }
        if scenario.u_monotone != UMonotone::None {
            match monotone_bounds_opt(obs, scenario, estimand, options) {
                Ok(interval) => out
                    .results
                    .push(BoundsResult::from_interval(estimand, scenario, interval)),
                Err(error) => out.failures.push(FailedBound {
                    estimand,
                    method: BoundMethod::Monotone,
                    error,
                }),
            }
        }
    }
    out
}

// ----- JSON-facing record --------------------------------------------------------------

/// Flat serializable record; `lower = None` encodes an infinite lower bound.
/// Table rendering additionally floors extreme lower bounds; JSON always
/// carries the raw value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub estimand: Estimand,
    pub method: BoundMethod,
    pub figure: Figure,
    pub m_monotone: MMonotone,
    pub u_monotone: UMonotone,
    pub a_monotone: AMonotone,
    pub lower: Option<f64>,
    pub upper: f64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_lower: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_upper: Option<(f64, f64)>,
}

impl From<&BoundsResult> for BoundsRecord {
    fn from(r: &BoundsResult) -> Self {
        BoundsRecord {
            estimand: r.estimand,
            method: r.method,
            figure: r.figure,
            m_monotone: r.m_monotone,
            u_monotone: r.u_monotone,
            a_monotone: r.a_monotone,
            lower: r.lower.finite().map(rat_to_f64),
            upper: rat_to_f64(&r.upper),
            feasible: r.feasible,
            point_estimate: r.point_estimate.as_ref().map(rat_to_f64),
            ci_lower: r.ci_lower,
            ci_upper: r.ci_upper,
        }
    }
}
