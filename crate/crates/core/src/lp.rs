//! Small exact linear programs over response-type probabilities.
//!
//! Every program here has at most a few dozen rational variables and a
//! handful of equality rows, so an exact two-phase simplex with Bland's rule
//! is both simple and fast. Exactness is the point: with rational inputs the
//! optimum is an exact rational, which lets the closed-form production path
//! be checked with `==` rather than a tolerance.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::observed::ObservedDistribution;
use crate::rat::Rat;
use crate::response_types::{enumerate_types, Message, TypeSet, NUM_TYPES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("infeasible: observed probabilities contradict the constraints")]
    Infeasible,
    #[error("unbounded objective")]
    Unbounded,
    #[error("conditioning cell has probability zero: {0}")]
    Positivity(String),
    #[error("denominator can reach zero on the feasible set")]
    DegenerateDenominator,
    #[error("event-stratified conditioning requested but no event block present")]
    MissingEventBlock,
}

/// Conditioning event of one stratum-level program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `(A=a, B=b)`.
    ArmBelief { a: u8, b: u8 },
    /// `(A=a, S=s, B=b)`.
    ArmEventBelief { a: u8, s: u8, b: u8 },
}

impl Condition {
    pub fn arm(&self) -> u8 {
        match self {
            Condition::ArmBelief { a, .. } | Condition::ArmEventBelief { a, .. } => *a,
        }
    }

    pub fn belief(&self) -> u8 {
        match self {
            Condition::ArmBelief { b, .. } | Condition::ArmEventBelief { b, .. } => *b,
        }
    }
}

/// One bound-of-a-conditional-expectation program in the 16 type weights.
#[derive(Debug, Clone)]
pub struct LpProblem {
    /// 0/1 objective selecting the target Q set.
    pub objective: Vec<Rat>,
    /// `R q = p` rows plus the normalization row.
    pub equality_rows: Vec<(Vec<Rat>, Rat)>,
    pub zero_indices: TypeSet,
    pub sense: Sense,
}

fn indicator_row(set: TypeSet) -> Vec<Rat> {
    (0..NUM_TYPES)
        .map(|i| if set.contains(i) { Rat::one() } else { Rat::zero() })
        .collect()
}

/// Assemble the program bounding `E(Y^{target.0, target.1} | condition)`.
pub fn build_lp(
    obs: &ObservedDistribution,
    condition: Condition,
    target: (u8, Message),
    zero: Option<TypeSet>,
    sense: Sense,
) -> Result<LpProblem, LpError> {
    let b = condition.belief();
    let table = enumerate_types(b);
    let (p1, label) = match condition {
        Condition::ArmBelief { a, b } => (
            obs.p_cond(1, a, b),
            format!("Pr(B={b}|A={a})"),
        ),
        Condition::ArmEventBelief { a, s, b } => {
            if !obs.has_s_block() {
                return Err(LpError::MissingEventBlock);
            }
            (obs.p_cond_s(1, a, b, s), format!("Pr(B={b}|A={a},S={s})"))
        }
    };
    let p1 = p1.ok_or(LpError::Positivity(label))?;
    let p0 = Rat::one() - &p1;

    // The constraint support is the blinded column of the conditioning arm,
    // which inside stratum b coincides with the (a, b) column.
    let constraint_set = table.q_set(condition.arm(), Message::Blinded);
    let objective_set = table.q_set(target.0, target.1);

    let equality_rows = vec![
        (indicator_row(constraint_set), p1),
        (indicator_row(constraint_set.complement()), p0),
        (indicator_row(TypeSet::ALL), Rat::one()),
    ];
    Ok(LpProblem {
        objective: indicator_row(objective_set),
        equality_rows,
        zero_indices: zero.unwrap_or(TypeSet::EMPTY),
        sense,
    })
}

/// Exact optimum of the program; `Infeasible` signals that the observed
/// probabilities contradict the imposed zero set.
pub fn solve(problem: &LpProblem) -> Result<Rat, LpError> {
    // Drop annihilated columns.
    let keep: Vec<usize> = (0..NUM_TYPES)
        .filter(|&i| !problem.zero_indices.contains(i))
        .collect();
    let a: Vec<Vec<Rat>> = problem
        .equality_rows
        .iter()
        .map(|(row, _)| keep.iter().map(|&i| row[i].clone()).collect())
        .collect();
    let b: Vec<Rat> = problem.equality_rows.iter().map(|(_, rhs)| rhs.clone()).collect();
    let c: Vec<Rat> = keep.iter().map(|&i| problem.objective[i].clone()).collect();
    simplex_optimize(&a, &b, &c, problem.sense)
}

/// Bound a conditional expectation from below and above.
pub fn bound_expectation(
    obs: &ObservedDistribution,
    condition: Condition,
    target: (u8, Message),
    zero: Option<TypeSet>,
) -> Result<(Rat, Rat), LpError> {
    let lo = solve(&build_lp(obs, condition, target, zero, Sense::Min)?)?;
    let hi = solve(&build_lp(obs, condition, target, zero, Sense::Max)?)?;
    debug_assert!(lo <= hi);
    Ok((lo, hi))
}

// ----- linear-fractional programs -------------------------------------------

/// A ratio of two affine forms over a product of per-stratum type simplices,
/// as needed for message effects whose numerator and denominator share an
/// arm. Solved exactly by the normalization substitution that scales the
/// denominator to one.
#[derive(Debug, Clone)]
pub struct RatioProgram {
    /// Per-stratum equality blocks; variables are the concatenation of the
    /// per-stratum type weights in order.
    pub strata: Vec<StratumBlock>,
    /// Weight of each stratum block applied to numerator/denominator sums.
    pub numerator: Vec<(usize, TypeSet, Rat)>,
    pub denominator: Vec<(usize, TypeSet, Rat)>,
}

#[derive(Debug, Clone)]
pub struct StratumBlock {
    /// Constraint support (blinded column within the stratum).
    pub constraint_set: TypeSet,
    /// Conditional probability attached to the constraint support.
    pub p1: Rat,
    pub zero_indices: TypeSet,
}

/// Build the shared-arm ratio program for the message effect at arm `a`:
/// numerator `E(Y^{a,1})`, denominator `E(Y^{a,0})`, optionally inside one
/// event stratum.
pub fn build_vem_ratio(
    obs: &ObservedDistribution,
    a: u8,
    zero: Option<TypeSet>,
    event_stratum: Option<u8>,
) -> Result<RatioProgram, LpError> {
    let zero = zero.unwrap_or(TypeSet::EMPTY);
    let mut strata = Vec::new();
    let mut numerator = Vec::new();
    let mut denominator = Vec::new();
    for b in 0..2u8 {
        let table = enumerate_types(b);
        let (pi, p1) = match event_stratum {
            None => (
                obs.pi(b, a),
                obs.p_cond(1, a, b)
                    .ok_or_else(|| LpError::Positivity(format!("Pr(B={b}|A={a})")))?,
            ),
            Some(s) => {
                if !obs.has_s_block() {
                    return Err(LpError::MissingEventBlock);
                }
                (
                    obs.pi_s(b, a, s).ok_or(LpError::MissingEventBlock)?,
                    obs.p_cond_s(1, a, b, s)
                        .ok_or_else(|| LpError::Positivity(format!("Pr(B={b}|A={a},S={s})")))?,
                )
            }
        };
        let idx = strata.len();
        strata.push(StratumBlock {
            constraint_set: table.q_set(a, Message::Blinded),
            p1,
            zero_indices: zero,
        });
        numerator.push((idx, table.q_set(a, Message::Told(1)), pi.clone()));
        denominator.push((idx, table.q_set(a, Message::Told(0)), pi));
    }
    Ok(RatioProgram {
        strata,
        numerator,
        denominator,
    })
}

impl RatioProgram {
    fn kept_columns(&self) -> Vec<(usize, usize)> {
        let mut cols = Vec::new();
        for (k, stratum) in self.strata.iter().enumerate() {
            for i in 0..NUM_TYPES {
                if !stratum.zero_indices.contains(i) {
                    cols.push((k, i));
                }
            }
        }
        cols
    }

    fn linear_coeffs(&self, terms: &[(usize, TypeSet, Rat)], cols: &[(usize, usize)]) -> Vec<Rat> {
        cols.iter()
            .map(|&(k, i)| {
                terms
                    .iter()
                    .filter(|(tk, set, _)| *tk == k && set.contains(i))
                    .map(|(_, _, w)| w.clone())
                    .fold(Rat::zero(), |acc, w| acc + w)
            })
            .collect()
    }

    fn stratum_rows(&self, cols: &[(usize, usize)]) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (k, stratum) in self.strata.iter().enumerate() {
            let in_stratum = |i: usize, set: TypeSet| set.contains(i);
            // Constraint-support mass.
            rows.push(
                cols.iter()
                    .map(|&(ck, i)| {
                        if ck == k && in_stratum(i, stratum.constraint_set) {
                            Rat::one()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect(),
            );
            rhs.push(stratum.p1.clone());
            // Normalization of the stratum distribution.
            rows.push(
                cols.iter()
                    .map(|&(ck, _)| if ck == k { Rat::one() } else { Rat::zero() })
                    .collect(),
            );
            rhs.push(Rat::one());
        }
        (rows, rhs)
    }
}

/// Exact optimum of a ratio program. Positivity of the denominator over the
/// feasible set is verified first; a reachable zero is an error rather than
/// a silent infinity.
pub fn bound_ratio(program: &RatioProgram, sense: Sense) -> Result<Rat, LpError> {
    ratio_extremum(program, sense, true)
}

/// Infimum of the ratio over the part of the feasible set where the
/// denominator is positive. The ratio of two nonnegative forms is bounded
/// below by zero, so this direction is safe even when the denominator can
/// vanish somewhere on the polytope.
pub fn ratio_minimum_allowing_zero_boundary(program: &RatioProgram) -> Result<Rat, LpError> {
    ratio_extremum(program, Sense::Min, false)
}

fn ratio_extremum(
    program: &RatioProgram,
    sense: Sense,
    check_degenerate: bool,
) -> Result<Rat, LpError> {
    let cols = program.kept_columns();
    let num_c = program.linear_coeffs(&program.numerator, &cols);
    let den_c = program.linear_coeffs(&program.denominator, &cols);
    let (rows, rhs) = program.stratum_rows(&cols);

    if check_degenerate {
        let den_min = simplex_optimize(&rows, &rhs, &den_c, Sense::Min)?;
        if den_min <= Rat::zero() {
            return Err(LpError::DegenerateDenominator);
        }
    }

    // Normalization substitution: y = t*q with t scaled so the denominator
    // equals one. Constraint rows become homogeneous in (y, t).
    let n = cols.len();
    let mut cc_rows: Vec<Vec<Rat>> = Vec::with_capacity(rows.len() + 1);
    let mut cc_rhs: Vec<Rat> = Vec::with_capacity(rows.len() + 1);
    for (row, r) in rows.iter().zip(rhs.iter()) {
        let mut v = row.clone();
        v.push(-r.clone());
        cc_rows.push(v);
        cc_rhs.push(Rat::zero());
    }
    let mut den_row = den_c.clone();
    den_row.push(Rat::zero());
    cc_rows.push(den_row);
    cc_rhs.push(Rat::one());

    let mut objective = num_c;
    objective.push(Rat::zero());
    debug_assert_eq!(objective.len(), n + 1);

    simplex_optimize(&cc_rows, &cc_rhs, &objective, sense)
}

// ----- exact two-phase simplex ----------------------------------------------

/// Optimize `c'x` subject to `Ax = b`, `x >= 0`, exactly in rationals.
pub fn simplex_optimize(
    a: &[Vec<Rat>],
    b: &[Rat],
    c: &[Rat],
    sense: Sense,
) -> Result<Rat, LpError> {
    let c_signed: Vec<Rat> = match sense {
        Sense::Max => c.to_vec(),
        Sense::Min => c.iter().map(|v| -v.clone()).collect(),
    };
    let value = simplex_maximize(a, b, &c_signed)?;
    Ok(match sense {
        Sense::Max => value,
        Sense::Min => -value,
    })
}

/// Dense tableau maximizer with Bland's rule; artificial variables provide a
/// starting basis (single-phase big-M-free formulation: phase one minimizes
/// the artificial mass, phase two proceeds on the reduced tableau).
fn simplex_maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<Rat, LpError> {
    let m = a.len();
    let n = if m == 0 { c.len() } else { a[0].len() };
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);

    // rows: m constraint rows over n structural + m artificial columns.
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rat> = a[i]
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        row.extend((0..m).map(|j| {
            if j == i {
                Rat::one()
            } else {
                Rat::zero()
            }
        }));
        tab.push(row);
        rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let total_cols = n + m;
    let mut basis: Vec<usize> = (n..total_cols).collect();

    // Phase 1: maximize minus the sum of artificials.
    let mut phase1_obj = vec![Rat::zero(); total_cols];
    for col in phase1_obj.iter_mut().skip(n) {
        *col = -Rat::one();
    }
    let p1 = run_simplex(&mut tab, &mut rhs, &mut basis, &phase1_obj, total_cols)?;
    if p1 < Rat::zero() {
        return Err(LpError::Infeasible);
    }
    // Pivot remaining artificials out of the basis where possible; rows whose
    // artificial cannot leave are redundant and harmless (their rhs is zero).
    for row in 0..m {
        if basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| !tab[row][j].is_zero()) {
                pivot(&mut tab, &mut rhs, row, col);
                basis[row] = col;
            }
        }
    }

    // Phase 2 on the structural objective; artificial columns are barred by
    // giving them a strongly negative reduced profile (they are removed from
    // candidate entering columns below via the `allowed` bound).
    let mut phase2_obj = vec![Rat::zero(); total_cols];
    phase2_obj[..n].clone_from_slice(c);
    let value = run_simplex_limited(&mut tab, &mut rhs, &mut basis, &phase2_obj, n)?;
    Ok(value)
}

fn run_simplex(
    tab: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    objective: &[Rat],
    allowed_cols: usize,
) -> Result<Rat, LpError> {
    run_simplex_limited(tab, rhs, basis, objective, allowed_cols)
}

/// Core pivot loop; only columns `< allowed_cols` may enter the basis.
fn run_simplex_limited(
    tab: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    objective: &[Rat],
    allowed_cols: usize,
) -> Result<Rat, LpError> {
    let m = tab.len();
    loop {
        // Reduced costs for the current basis.
        let mut reduced: Vec<Rat> = objective[..allowed_cols].to_vec();
        for row in 0..m {
            let coeff = objective[basis[row]].clone();
            if coeff.is_zero() {
                continue;
            }
            for (j, red) in reduced.iter_mut().enumerate() {
                *red -= &coeff * &tab[row][j];
            }
        }
        // Bland: smallest-index improving column.
        let entering = (0..allowed_cols).find(|&j| reduced[j] > Rat::zero());
        let Some(col) = entering else {
            let value = (0..m)
                .map(|row| &objective[basis[row]] * &rhs[row])
                .fold(Rat::zero(), |acc, v| acc + v);
            return Ok(value);
        };
        // Ratio test, Bland tie-break on basis index.
        let mut leaving: Option<(usize, Rat)> = None;
        for row in 0..m {
            if tab[row][col] > Rat::zero() {
                let ratio = &rhs[row] / &tab[row][col];
                let better = match &leaving {
                    None => true,
                    Some((best_row, best)) => {
                        ratio < *best || (ratio == *best && basis[row] < basis[*best_row])
                    }
                };
                if better {
                    leaving = Some((row, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return Err(LpError::Unbounded);
        };
        pivot(tab, rhs, row, col);
        basis[row] = col;
    }
}

fn pivot(tab: &mut [Vec<Rat>], rhs: &mut [Rat], prow: usize, pcol: usize) {
    let m = tab.len();
    let pivot_val = tab[prow][pcol].clone();
    for v in tab[prow].iter_mut() {
        *v /= &pivot_val;
    }
    rhs[prow] /= &pivot_val;
    for row in 0..m {
        if row == prow {
            continue;
        }
        let factor = tab[row][pcol].clone();
        if factor.is_zero() {
            continue;
        }
        let pivot_row = tab[prow].clone();
        for (v, pv) in tab[row].iter_mut().zip(pivot_row.iter()) {
            *v -= &factor * pv;
        }
        let prhs = rhs[prow].clone();
        rhs[row] -= &factor * &prhs;
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::observed::ObservedDistribution;
    use crate::rat::{one, rat, zero};
    use crate::response_types::{zero_set, MonotoneTag};

    fn obs_fixture() -> ObservedDistribution {
        // p_{00.0}=0.35, p_{10.0}=0.20, p_{01.0}=0.30, p_{11.0}=0.15
        // p_{00.1}=0.40, p_{10.1}=0.10, p_{01.1}=0.35, p_{11.1}=0.15
        let joint = [
            [[rat(35, 100), rat(30, 100)], [rat(20, 100), rat(15, 100)]],
            [[rat(40, 100), rat(35, 100)], [rat(10, 100), rat(15, 100)]],
        ];
        ObservedDistribution::from_joint(joint).unwrap()
    }

    #[test]
    fn constraint_supports_match_published_sets() {
        let obs = obs_fixture();
        let lp = build_lp(
            &obs,
            Condition::ArmBelief { a: 1, b: 0 },
            (1, Message::Told(0)),
            None,
            Sense::Min,
        )
        .unwrap();
        let support = |row: &Vec<Rat>| -> Vec<usize> {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, _)| i)
                .collect()
        };
        assert_eq!(support(&lp.objective), vec![3, 6, 8, 10, 11, 13, 14, 15]);
        assert_eq!(
            support(&lp.equality_rows[1].0),
            vec![0, 1, 2, 4, 5, 7, 9, 12]
        );
        // Within the b=0 stratum the (a=1) constraint support equals the
        // objective support for target (1, 0).
        assert_eq!(support(&lp.equality_rows[0].0), support(&lp.objective));
    }

    #[test]
    fn point_identified_cell_is_pinned() {
        // min E(Y^{1,0}|A=1,B=0) = p_{1.10} = 0.1/0.5 = 0.2
        let obs = obs_fixture();
        let (lo, hi) = bound_expectation(
            &obs,
            Condition::ArmBelief { a: 1, b: 0 },
            (1, Message::Told(0)),
            None,
        )
        .unwrap();
        assert_eq!(lo, rat(1, 5));
        assert_eq!(hi, rat(1, 5));
    }

    #[test]
    fn cross_message_cell_is_vacuous() {
        // max E(Y^{0,0}|A=0,B=1) = 1
        let obs = obs_fixture();
        let (lo, hi) = bound_expectation(
            &obs,
            Condition::ArmBelief { a: 0, b: 1 },
            (0, Message::Told(0)),
            None,
        )
        .unwrap();
        assert_eq!(lo, zero());
        assert_eq!(hi, one());
    }

    #[test]
    fn degenerate_point_mass_saturates_with_zero_set() {
        // p_{1.01} = 1: everyone with (A=0, B=1) infected. Under the
        // message-monotone zero set, max E(Y^{0,1}|A=0,B=1) is still 1.
        let joint = [
            [[rat(1, 2), zero()], [zero(), rat(1, 2)]],
            [[rat(1, 4), rat(1, 4)], [rat(1, 4), rat(1, 4)]],
        ];
        let obs = ObservedDistribution::from_joint(joint).unwrap();
        let zero_m = zero_set(MonotoneTag::MNonNeg).indices;
        let (_, hi) = bound_expectation(
            &obs,
            Condition::ArmBelief { a: 0, b: 1 },
            (0, Message::Told(1)),
            Some(zero_m),
        )
        .unwrap();
        assert_eq!(hi, one());
    }

    #[test]
    fn zero_sets_never_widen() {
        let obs = obs_fixture();
        for a in 0..2u8 {
            for b in 0..2u8 {
                for target_a in 0..2u8 {
                    for m in [Message::Told(0), Message::Told(1)] {
                        let cond = Condition::ArmBelief { a, b };
                        let (lo, hi) = bound_expectation(&obs, cond, (target_a, m), None).unwrap();
                        for tag in [
                            MonotoneTag::MNonNeg,
                            MonotoneTag::MNonPos,
                            MonotoneTag::ANonNeg,
                            MonotoneTag::ANonPos,
                        ] {
                            let z = zero_set(tag).indices;
                            let (zlo, zhi) =
                                bound_expectation(&obs, cond, (target_a, m), Some(z)).unwrap();
                            assert!(zlo >= lo && zhi <= hi, "{tag:?} widened the interval");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn solver_matches_vertex_enumeration() {
        let obs = obs_fixture();
        for a in 0..2u8 {
            for b in 0..2u8 {
                for target_a in 0..2u8 {
                    for m in [Message::Told(0), Message::Told(1)] {
                        for sense in [Sense::Min, Sense::Max] {
                            let lp = build_lp(
                                &obs,
                                Condition::ArmBelief { a, b },
                                (target_a, m),
                                Some(zero_set(MonotoneTag::MNonNeg).indices),
                                sense,
                            )
                            .unwrap();
                            let fast = solve(&lp).unwrap();
                            let slow = vertex_oracle::solve_by_vertices(&lp).unwrap();
                            assert_eq!(fast, slow);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vem_ratio_matches_closed_form_fixture() {
        // Lower bound of the arm-1 message effect for the fixture:
        // 1 - (1 - p_{01.1}) / p_{10.1} = 1 - 0.65/0.10 = -5.5, and the upper
        // is 1 - p_{11.1} / (1 - p_{00.1}) = 1 - 0.15/0.60 = 0.75.
        let obs = obs_fixture();
        let program = build_vem_ratio(&obs, 1, None, None).unwrap();
        let num_over_den_max = bound_ratio(&program, Sense::Max).unwrap();
        let num_over_den_min = bound_ratio(&program, Sense::Min).unwrap();
        let vem_lower = one() - num_over_den_max;
        let vem_upper = one() - num_over_den_min;
        assert_eq!(vem_lower, rat(-11, 2));
        assert_eq!(vem_upper, rat(3, 4));
    }

    #[test]
    fn identical_ratio_blocks_give_unity() {
        let obs = obs_fixture();
        let mut program = build_vem_ratio(&obs, 1, None, None).unwrap();
        program.numerator = program.denominator.clone();
        assert_eq!(bound_ratio(&program, Sense::Min).unwrap(), one());
        assert_eq!(bound_ratio(&program, Sense::Max).unwrap(), one());
    }

    #[test]
    fn degenerate_denominator_is_flagged() {
        let obs = obs_fixture();
        let mut program = build_vem_ratio(&obs, 1, None, None).unwrap();
        // Restrict the denominator to the pinned stratum only, then zero the
        // constraint mass by moving the conditional to zero: rebuild with a
        // distribution whose (A=1,B=0) stratum has no infections and whose
        // denominator only counts that stratum's blinded set complement.
        program.denominator = vec![(0, TypeSet::EMPTY, one())];
        assert!(matches!(
            bound_ratio(&program, Sense::Max),
            Err(LpError::DegenerateDenominator)
        ));
    }

    #[test]
    fn infeasible_constraints_are_reported() {
        // Force an impossible system: constraint support empty but p1 > 0.
        let problem = LpProblem {
            objective: indicator_row(TypeSet::from_indices(&[0])),
            equality_rows: vec![
                (indicator_row(TypeSet::from_indices(&[1])), rat(1, 2)),
                (indicator_row(TypeSet::ALL), one()),
            ],
            zero_indices: TypeSet::from_indices(&[1]),
            sense: Sense::Max,
        };
        assert!(matches!(solve(&problem), Err(LpError::Infeasible)));
    }
}
