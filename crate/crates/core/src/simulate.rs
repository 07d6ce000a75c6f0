//! Synthetic two-arm trials with full potential-outcome tables.
//!
//! Each individual carries every counterfactual `(S^a, B^{a,-1}, Y^{a,m})`,
//! so population truths need no identification argument: they are plain
//! means over the table. Generation uses one deterministic RNG substream per
//! individual, which makes the parallel and sequential paths bit-identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{all_bounds_opt, AllBounds, BoundOptions, Estimand, Figure, ScenarioSpec};
use crate::observed::{estimate_observed, ObservedDistribution, TrialRecord};
use crate::par;

fn expit(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-individual substream seed.
fn substream(seed: u64, index: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index as u64 + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UMode {
    /// Bernoulli(0.5) confounder entering the linear predictors linearly;
    /// keeps the monotone-confounding structure satisfiable.
    Bernoulli,
    /// Standard normal confounder entering through its square; breaks the
    /// monotone-confounding structure by construction.
    GaussianSquared,
}

/// Coefficients of the structural models plus the population size and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgmConfig {
    pub n: usize,
    pub prob_a: f64,
    pub u_mode: UMode,
    pub delta_0: f64,
    pub delta_a: f64,
    pub delta_u: f64,
    pub gamma_0: f64,
    pub gamma_a: f64,
    pub gamma_b0: f64,
    pub gamma_b1: f64,
    pub gamma_s: f64,
    pub gamma_u: f64,
    pub beta_0: f64,
    pub beta_s: f64,
    pub beta_u: f64,
    pub seed: u64,
}

impl DgmConfig {
    /// Baseline coefficients; all strata stay populated, the monotone
    /// assumptions hold, and the bound widths respond to the unblinding
    /// strength in the expected directions. Event and belief models are
    /// moderately coupled.
    pub fn standard(n: usize, seed: u64) -> Self {
        DgmConfig {
            n,
            prob_a: 0.5,
            u_mode: UMode::Bernoulli,
            delta_0: -0.5,
            delta_a: 1.0,
            delta_u: 1.0,
            gamma_0: -2.0,
            gamma_a: -0.7,
            gamma_b0: 1.5f64.ln(),
            gamma_b1: 1.5f64.ln(),
            gamma_s: 1.3f64.ln(),
            gamma_u: 2.0f64.ln(),
            beta_0: -0.5,
            beta_s: 2.0f64.ln(),
            beta_u: 2.0f64.ln(),
            seed,
        }
    }

    /// Zero out the coefficients that distinguish the causal diagrams:
    /// no confounder-to-event path and/or no event-to-outcome path.
    pub fn for_figure(figure: Figure, n: usize, seed: u64) -> Self {
        let mut cfg = Self::standard(n, seed);
        match figure {
            Figure::Fig2 | Figure::Fig3d => {}
            Figure::Fig3a => {
                cfg.delta_u = 0.0;
                cfg.gamma_s = 0.0;
            }
            Figure::Fig3b => {
                cfg.delta_u = 0.0;
            }
            Figure::Fig3c => {
                cfg.gamma_s = 0.0;
            }
        }
        cfg
    }

    /// Which diagram the coefficient pattern corresponds to (event observed).
    pub fn implied_figure(&self) -> Figure {
        match (self.delta_u == 0.0, self.gamma_s == 0.0) {
            (true, true) => Figure::Fig3a,
            (true, false) => Figure::Fig3b,
            (false, true) => Figure::Fig3c,
            (false, false) => Figure::Fig3d,
        }
    }
}

/// One individual's confounder, assignment, and full counterfactual set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Individual {
    pub u: f64,
    pub arm: bool,
    /// `S^a` for a in {0,1}.
    pub event: [bool; 2],
    /// `Y^{a,m}` for a, m in {0,1}.
    pub outcome: [[bool; 2]; 2],
    /// `B^{a,-1}` for a in {0,1}.
    pub belief_blinded: [bool; 2],
}

impl Individual {
    /// `Y^{a,-1}`: the blinded outcome resolves through the blinded belief.
    pub fn outcome_blinded(&self, a: usize) -> bool {
        self.outcome[a][self.belief_blinded[a] as usize]
    }

    pub fn observed(&self) -> (u8, u8, u8, u8) {
        let a = self.arm as usize;
        (
            self.arm as u8,
            self.belief_blinded[a] as u8,
            self.event[a] as u8,
            self.outcome_blinded(a) as u8,
        )
    }
}

#[derive(Debug, Clone)]
pub struct PotentialTable {
    pub individuals: Vec<Individual>,
    pub seed: u64,
}

/// Draw the population. Reproducible given the seed; the parallel and
/// sequential paths agree because every individual owns a substream.
pub fn generate(config: &DgmConfig) -> PotentialTable {
    let rows = par::map_indexed(config.n, |i| draw_individual(config, i));
    PotentialTable {
        individuals: rows,
        seed: config.seed,
    }
}

/// Sequential twin of [`generate`]; used by the bench suite.
pub fn generate_seq(config: &DgmConfig) -> PotentialTable {
    let rows = par::map_indexed_seq(config.n, |i| draw_individual(config, i));
    PotentialTable {
        individuals: rows,
        seed: config.seed,
    }
}

fn draw_individual(config: &DgmConfig, index: usize) -> Individual {
    let mut rng = ChaCha8Rng::seed_from_u64(substream(config.seed, index));
    let arm = rng.gen::<f64>() < config.prob_a;
    let u = match config.u_mode {
        UMode::Bernoulli => {
            if rng.gen::<f64>() < 0.5 {
                1.0
            } else {
                0.0
            }
        }
        UMode::GaussianSquared => {
            // Box-Muller; one normal per individual.
            let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    };
    // The confounder enters linearly in the Bernoulli mode and through its
    // square in the Gaussian mode.
    let u_term = match config.u_mode {
        UMode::Bernoulli => u,
        UMode::GaussianSquared => u * u,
    };

    let mut event = [false; 2];
    for a in 0..2 {
        let p = expit(config.delta_0 + config.delta_a * a as f64 + config.delta_u * u_term);
        event[a] = rng.gen::<f64>() < p;
    }
    let mut outcome = [[false; 2]; 2];
    for a in 0..2 {
        let gamma_b = if a == 1 { config.gamma_b1 } else { config.gamma_b0 };
        for m in 0..2 {
            let p = expit(
                config.gamma_0
                    + config.gamma_a * a as f64
                    + gamma_b * m as f64
                    + config.gamma_s * event[a] as u8 as f64
                    + config.gamma_u * u_term,
            );
            outcome[a][m] = rng.gen::<f64>() < p;
        }
    }
    let mut belief_blinded = [false; 2];
    for a in 0..2 {
        let p = expit(config.beta_0 + config.beta_s * event[a] as u8 as f64 + config.beta_u * u_term);
        belief_blinded[a] = rng.gen::<f64>() < p;
    }
    Individual {
        u,
        arm,
        event,
        outcome,
        belief_blinded,
    }
}

// ----- population summaries ---------------------------------------------------

/// Population-level values of every estimand, straight from the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueEstimands {
    /// `E(Y^{a,m})` indexed `[a][m]`.
    pub mean_outcome: [[f64; 2]; 2],
    /// `E(Y^{a,-1})` indexed by `a`.
    pub mean_outcome_blinded: [f64; 2],
}

#[derive(Debug, thiserror::Error)]
pub enum SimulateError {
    #[error("zero denominator for {0:?} at the population level")]
    ZeroDenominator(Estimand),
}

impl TrueEstimands {
    pub fn value(&self, estimand: Estimand) -> Result<f64, SimulateError> {
        let e = &self.mean_outcome;
        let ratio = |num: f64, den: f64| -> Result<f64, SimulateError> {
            if den == 0.0 {
                Err(SimulateError::ZeroDenominator(estimand))
            } else {
                Ok(1.0 - num / den)
            }
        };
        match estimand {
            Estimand::VeMinus1 => ratio(self.mean_outcome_blinded[1], self.mean_outcome_blinded[0]),
            Estimand::Ve0 => ratio(e[1][0], e[0][0]),
            Estimand::Ve1 => ratio(e[1][1], e[0][1]),
            Estimand::VeT => ratio(e[1][1], e[0][0]),
            Estimand::VeM0 => ratio(e[0][1], e[0][0]),
            Estimand::VeM1 => ratio(e[1][1], e[1][0]),
            Estimand::BehavioralDiff0 => Ok(e[0][1] - e[0][0]),
            Estimand::BehavioralDiff1 => Ok(e[1][1] - e[1][0]),
            Estimand::ImmunologicalDiff0 => Ok(e[1][0] - e[0][0]),
            Estimand::ImmunologicalDiff1 => Ok(e[1][1] - e[0][1]),
            Estimand::TotalDiff => Ok(e[1][1] - e[0][0]),
        }
    }
}

impl PotentialTable {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Plug-in means of the potential outcomes over the whole population.
    pub fn true_estimands(&self) -> TrueEstimands {
        let n = self.individuals.len() as f64;
        let mut mean_outcome = [[0.0f64; 2]; 2];
        let mut mean_outcome_blinded = [0.0f64; 2];
        for row in &self.individuals {
            for a in 0..2 {
                for m in 0..2 {
                    mean_outcome[a][m] += row.outcome[a][m] as u8 as f64;
                }
                mean_outcome_blinded[a] += row.outcome_blinded(a) as u8 as f64;
            }
        }
        for a in 0..2 {
            for m in 0..2 {
                mean_outcome[a][m] /= n;
            }
            mean_outcome_blinded[a] /= n;
        }
        TrueEstimands {
            mean_outcome,
            mean_outcome_blinded,
        }
    }

    /// Observed micro-data under blinding, one record per individual.
    pub fn observed_records(&self, include_event: bool) -> Vec<TrialRecord> {
        self.individuals
            .iter()
            .map(|row| {
                let (a, b, s, y) = row.observed();
                TrialRecord::new(a, b, include_event.then_some(s), y)
            })
            .collect()
    }

    /// Observed cell counts aggregated into weighted records.
    pub fn observed_counts(&self, include_event: bool) -> Vec<TrialRecord> {
        let mut counts = [[[[0u64; 2]; 2]; 2]; 2];
        for row in &self.individuals {
            let (a, b, s, y) = row.observed();
            let s = if include_event { s } else { 0 };
            counts[a as usize][s as usize][y as usize][b as usize] += 1;
        }
        let mut out = Vec::new();
        for a in 0..2u8 {
            for s in 0..2u8 {
                for y in 0..2u8 {
                    for b in 0..2u8 {
                        let w = counts[a as usize][s as usize][y as usize][b as usize];
                        if w > 0 {
                            out.push(
                                TrialRecord::new(a, b, include_event.then_some(s), y)
                                    .with_weight(w),
                            );
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact empirical observed distribution of the population.
    pub fn observed_distribution(
        &self,
        include_event: bool,
    ) -> Result<ObservedDistribution, crate::observed::ObservedError> {
        estimate_observed(&self.observed_counts(include_event))
    }

    /// Population-level bounds: the observed distribution of the full table
    /// fed through the scenario dispatcher.
    pub fn true_bounds(
        &self,
        scenario: &ScenarioSpec,
        options: &BoundOptions,
    ) -> Result<AllBounds, crate::observed::ObservedError> {
        let include_event = scenario.figure != Figure::Fig2;
        let obs = self.observed_distribution(include_event)?;
        Ok(all_bounds_opt(&obs, scenario, options))
    }
}

// ----- sharpness witness DGM ----------------------------------------------------

/// Binary-confounder population on which the unsharpened bound for the
/// told-unvaccinated contrast collapses onto the truth: belief equals the
/// confounder exactly, and the outcome model pins the believed-vaccinated
/// cells to a degenerate value per arm. The flipped variant drives the upper
/// endpoint instead of the lower one.
///
/// Assignment is systematic rather than sampled: arm and confounder cycle
/// through the four combinations and the unconfounded outcome follows a
/// periodic pattern with the requested frequency (resolution 1e-3). With `n`
/// a multiple of 4000 every empirical cell frequency is exact, so the
/// attained endpoint matches the population truth with no Monte Carlo gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    pub n: usize,
    pub psi0: f64,
    pub psi1: f64,
    pub flipped: bool,
    pub seed: u64,
}

pub fn generate_sharpness(config: &SharpnessConfig) -> PotentialTable {
    const RESOLUTION: usize = 1000;
    let thresholds = [
        (config.psi0 * RESOLUTION as f64).round() as usize,
        (config.psi1 * RESOLUTION as f64).round() as usize,
    ];
    let flipped = config.flipped;
    let rows = par::map_indexed(config.n, move |i| {
        let arm = i & 1 == 1;
        let u = ((i >> 1) & 1) as f64;
        let cell_index = i >> 2;
        let mut outcome = [[false; 2]; 2];
        for a in 0..2 {
            let y = if u == 1.0 {
                if flipped {
                    a == 0
                } else {
                    a == 1
                }
            } else {
                // Periodic pattern with exact frequency over full periods.
                (cell_index + a * RESOLUTION / 2) % RESOLUTION < thresholds[a]
            };
            // The message has no effect in this design.
            outcome[a] = [y, y];
        }
        Individual {
            u,
            arm,
            event: [false; 2],
            outcome,
            belief_blinded: [u == 1.0; 2],
        }
    });
    PotentialTable {
        individuals: rows,
        seed: config.seed,
    }
}

// ----- deterministic trial-like fixture ------------------------------------------

/// Deterministic expected-count dataset shaped like a large trial safety
/// subset: event rates 22.5% vs 57.3% by arm, blinded efficacy 39.3%,
/// infection risk elevated among those with events, and a belief model that
/// loads on both the event and the outcome. Weights are exact cell counts
/// out of 1e8 per arm. The event-outcome and belief-outcome couplings make
/// the event-sharpened monotone bounds contradict the data while the
/// conservative-diagram bounds stay feasible.
pub fn trial_like_counts() -> Vec<TrialRecord> {
    // Per-mille event rates, per-ten-thousand infection rates by (arm,
    // event), per-ten belief rates given (event, outcome).
    let event_per_mille = [225u64, 573];
    let infect_per_tenk = |a: u8, s: u8| -> u64 {
        match (a, s) {
            (0, 0) => 300,
            (0, 1) => 1000,
            (1, 0) => 150,
            (1, 1) => 373,
            _ => unreachable!(),
        }
    };
    let belief_per_ten = |s: u8, y: u8| -> u64 {
        match (s, y) {
            (1, 1) => 7,
            (1, 0) => 5,
            (0, 1) => 2,
            (0, 0) => 1,
            _ => unreachable!(),
        }
    };
    let mut out = Vec::new();
    for a in 0..2u8 {
        for s in 0..2u8 {
            let gn = if s == 1 {
                event_per_mille[a as usize]
            } else {
                1000 - event_per_mille[a as usize]
            };
            for y in 0..2u8 {
                let pn = if y == 1 {
                    infect_per_tenk(a, s)
                } else {
                    10_000 - infect_per_tenk(a, s)
                };
                for b in 0..2u8 {
                    let bn = if b == 1 {
                        belief_per_ten(s, y)
                    } else {
                        10 - belief_per_ten(s, y)
                    };
                    let weight = gn * pn * bn;
                    if weight > 0 {
                        out.push(TrialRecord::new(a, b, Some(s), y).with_weight(weight));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{BoundMethod, MMonotone, UMonotone};

    #[test]
    fn seed_determinism_and_par_seq_agreement() {
        let config = DgmConfig::standard(2_000, 42);
        let a = generate(&config);
        let b = generate(&config);
        let c = generate_seq(&config);
        assert_eq!(a.individuals, b.individuals);
        assert_eq!(a.individuals, c.individuals);
    }

    #[test]
    fn consistency_resolution_is_exact() {
        let config = DgmConfig::standard(5_000, 7);
        let table = generate(&config);
        for row in &table.individuals {
            let (a, b, _, y) = row.observed();
            let a = a as usize;
            assert_eq!(b, row.belief_blinded[a] as u8);
            assert_eq!(y, row.outcome[a][row.belief_blinded[a] as usize] as u8);
        }
    }

    #[test]
    fn randomization_margin_is_respected() {
        let config = DgmConfig::standard(100_000, 11);
        let table = generate(&config);
        let frac = table.individuals.iter().filter(|r| r.arm).count() as f64
            / table.individuals.len() as f64;
        let se = (0.5 * 0.5 / table.individuals.len() as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * se, "Pr(A=1) = {frac}");
    }

    #[test]
    fn null_message_effect_when_belief_coefficients_vanish() {
        let mut config = DgmConfig::standard(200_000, 3);
        config.gamma_b0 = 0.0;
        config.gamma_b1 = 0.0;
        let truth = generate(&config).true_estimands();
        for a in 0..2 {
            let diff = truth.mean_outcome[a][1] - truth.mean_outcome[a][0];
            assert!(diff.abs() < 0.005, "message moved the mean by {diff}");
        }
    }

    #[test]
    fn flat_belief_model_gives_half() {
        let mut config = DgmConfig::standard(200_000, 5);
        config.beta_0 = 0.0;
        config.beta_s = 0.0;
        config.beta_u = 0.0;
        let table = generate(&config);
        let frac = table
            .individuals
            .iter()
            .filter(|r| r.belief_blinded[r.arm as usize])
            .count() as f64
            / table.individuals.len() as f64;
        assert!((frac - 0.5).abs() < 0.005);
    }

    #[test]
    fn vaccine_arm_has_more_events() {
        let config = DgmConfig::standard(500_000, 13);
        let table = generate(&config);
        let obs = table.observed_distribution(true).unwrap();
        let g1 = crate::rat::rat_to_f64(obs.gamma(1, 1).unwrap());
        let g0 = crate::rat::rat_to_f64(obs.gamma(1, 0).unwrap());
        assert!(g1 > g0, "expected more events under vaccine: {g1} vs {g0}");
    }

    #[test]
    fn protective_limit_sends_efficacy_to_one() {
        let mut config = DgmConfig::standard(100_000, 17);
        config.gamma_a = -20.0;
        let truth = generate(&config).true_estimands();
        for estimand in [Estimand::Ve0, Estimand::Ve1, Estimand::VeT] {
            let v = truth.value(estimand).unwrap();
            assert!(v > 0.999, "{estimand:?} = {v}");
        }
    }

    #[test]
    fn null_effect_gives_zero_efficacy() {
        // Identical outcome models across arms and messages.
        let mut config = DgmConfig::standard(400_000, 19);
        config.gamma_a = 0.0;
        config.delta_a = 0.0;
        config.gamma_b0 = 0.0;
        config.gamma_b1 = 0.0;
        let truth = generate(&config).true_estimands();
        for estimand in [Estimand::Ve0, Estimand::Ve1, Estimand::VeT] {
            let v = truth.value(estimand).unwrap();
            assert!(v.abs() < 0.02, "{estimand:?} = {v}");
        }
    }

    #[test]
    fn figure_mapping_independence_checks() {
        let config = DgmConfig::for_figure(Figure::Fig3a, 400_000, 23);
        let table = generate(&config);
        // S independent of U: compare event rates across confounder levels.
        let mut rate = [[0.0f64; 2]; 2]; // [u][a]
        let mut count = [0.0f64; 2];
        for row in &table.individuals {
            let u = row.u as usize;
            count[u] += 1.0;
            for a in 0..2 {
                rate[u][a] += row.event[a] as u8 as f64;
            }
        }
        for a in 0..2 {
            let r0 = rate[0][a] / count[0];
            let r1 = rate[1][a] / count[1];
            assert!((r0 - r1).abs() < 0.01, "event rate differs across U: {r0} vs {r1}");
        }
        // Y independent of S given (A, B, U): gamma_s = 0 here, so compare
        // outcome rates across event status within one (a, m, u) cell.
        let mut y_rate = [[0.0f64; 2]; 2]; // [s][.] for (a=1, m=0, u=1)
        let mut y_count = [0.0f64; 2];
        for row in &table.individuals {
            if row.u == 1.0 {
                let s = row.event[1] as usize;
                y_count[s] += 1.0;
                y_rate[s][0] += row.outcome[1][0] as u8 as f64;
            }
        }
        let r0 = y_rate[0][0] / y_count[0];
        let r1 = y_rate[1][0] / y_count[1];
        assert!((r0 - r1).abs() < 0.01, "outcome rate differs across S: {r0} vs {r1}");
    }

    #[test]
    fn true_values_lie_inside_population_bounds() {
        let config = DgmConfig::for_figure(Figure::Fig3d, 300_000, 29);
        let table = generate(&config);
        let scenario = ScenarioSpec::new(Figure::Fig3d)
            .with_u(UMonotone::Concordant)
            .with_m(MMonotone::NonNeg);
        let truth = table.true_estimands();
        let bounds = table
            .true_bounds(&scenario, &BoundOptions::default())
            .unwrap();
        for estimand in Estimand::RATIO_CORE {
            let t = truth.value(estimand).unwrap();
            for method in [BoundMethod::Lp, BoundMethod::Monotone] {
                let r = bounds.get(estimand, method).unwrap();
                assert!(r.feasible);
                assert!(
                    r.lower.as_f64() - 0.01 <= t && t <= r.upper_f64() + 0.01,
                    "{estimand:?}/{method:?}: {t} outside [{}, {}]",
                    r.lower.as_f64(),
                    r.upper_f64()
                );
            }
        }
    }

    #[test]
    fn sharpness_population_pins_lower_bound() {
        let config = SharpnessConfig {
            n: 400_000,
            psi0: 0.6,
            psi1: 0.3,
            flipped: false,
            seed: 31,
        };
        let table = generate_sharpness(&config);
        let truth = table.true_estimands().value(Estimand::Ve0).unwrap();
        let obs = table.observed_distribution(false).unwrap();
        let interval =
            crate::bounds::lp_bounds(&obs, &ScenarioSpec::new(Figure::Fig2), Estimand::Ve0)
                .unwrap();
        let lower = interval.lower.as_f64();
        // Truth = 1 - (1 + psi1)/psi0 at the population level.
        let expected = 1.0 - (1.0 + config.psi1) / config.psi0;
        assert!((truth - expected).abs() < 0.01);
        assert!((lower - truth).abs() < 0.01, "lower {lower} vs truth {truth}");
    }

    #[test]
    fn trial_like_fixture_reproduces_margins() {
        let records = trial_like_counts();
        let obs = estimate_observed(&records).unwrap();
        assert_eq!(obs.gamma(1, 1).unwrap(), &crate::rat::rat(573, 1000));
        assert_eq!(obs.gamma(1, 0).unwrap(), &crate::rat::rat(225, 1000));
        let ve = crate::bounds::blinded_point_value(&obs).unwrap();
        let ve = crate::rat::rat_to_f64(&ve);
        assert!((ve - 0.3933).abs() < 0.001, "blinded efficacy {ve}");
    }
}
