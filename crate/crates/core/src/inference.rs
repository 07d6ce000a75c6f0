//! Percentile-bootstrap confidence intervals for bound endpoints and the
//! coverage-evaluation harness.
//!
//! The full estimator is recomputed on each resample and both endpoints are
//! read off jointly. Replicates that fail (positivity on a resample, say)
//! are dropped from the quantile pool and counted; more than 20% failures
//! aborts. Quantiles use type-7 linear interpolation so confidence limits
//! are reproducible to the last bit given identical resamples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    lp_bounds_fast, monotone_bounds_opt, BoundMethod, BoundOptions, BoundsError, Estimand,
    Interval, ScenarioSpec,
};
use crate::observed::{estimate_observed, ObservedError, TrialRecord};
use crate::par;
use crate::simulate::{generate, DgmConfig, PotentialTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Resample within each arm, preserving arm sizes, instead of plain iid
    /// row resampling.
    pub stratify_arm: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 200,
            alpha: 0.05,
            seed: 0,
            stratify_arm: false,
        }
    }
}

impl BootstrapConfig {
    fn validate(&self) -> Result<(), InferenceError> {
        if self.replicates < 2 {
            return Err(InferenceError::BadConfig("replicates must be >= 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(InferenceError::BadConfig("alpha must lie in (0,1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("bootstrap config: {0}")]
    BadConfig(String),
    #[error("{failed} of {total} bootstrap replicates failed (limit 20%)")]
    TooManyFailures { failed: usize, total: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Observed(#[from] ObservedError),
}

/// Percentile CIs for the two endpoints of one estimand/method pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointCi {
    pub lower_ci: (f64, f64),
    pub upper_ci: (f64, f64),
    pub failures: usize,
    pub replicates_used: usize,
}

/// Type-7 quantile (linear interpolation between order statistics).
/// `sorted` must be ascending; infinite entries are propagated the way R
/// propagates them: any interpolation touching an infinite order statistic
/// with positive weight stays infinite.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= n {
        sorted[lo.min(n - 1)]
    } else {
        (1.0 - frac) * sorted[lo] + frac * sorted[lo + 1]
    }
}

fn interval_for(
    obs: &crate::observed::ObservedDistribution,
    scenario: &ScenarioSpec,
    estimand: Estimand,
    method: BoundMethod,
    options: &BoundOptions,
) -> Result<Interval, BoundsError> {
    match method {
        BoundMethod::Lp => lp_bounds_fast(obs, scenario, estimand, options),
        BoundMethod::Monotone => monotone_bounds_opt(obs, scenario, estimand, options),
        BoundMethod::Point => {
            let v = crate::bounds::blinded_point_value(obs)?;
            Ok(Interval {
                lower: crate::bounds::Endpoint::Finite(v.clone()),
                upper: v,
                feasible: true,
                method: BoundMethod::Point,
            })
        }
    }
}

fn resample(records: &[TrialRecord], rng: &mut ChaCha8Rng, stratify_arm: bool) -> Vec<TrialRecord> {
    let expanded: Vec<TrialRecord> = if records.iter().all(|r| r.weight == 1) {
        records.to_vec()
    } else {
        // Weighted rows stand for that many individuals.
        let mut rows = Vec::new();
        for r in records {
            for _ in 0..r.weight {
                rows.push(TrialRecord { weight: 1, ..*r });
            }
        }
        rows
    };
    if stratify_arm {
        let mut out = Vec::with_capacity(expanded.len());
        for arm in 0..2u8 {
            let pool: Vec<&TrialRecord> = expanded.iter().filter(|r| r.arm == arm).collect();
            if pool.is_empty() {
                continue;
            }
            for _ in 0..pool.len() {
                out.push(*pool[rng.gen_range(0..pool.len())]);
            }
        }
        out
    } else {
        (0..expanded.len())
            .map(|_| expanded[rng.gen_range(0..expanded.len())])
            .collect()
    }
}

fn replicate_seed(seed: u64, replicate: usize) -> u64 {
    // Same mixing as the simulator's substreams.
    let mut z = seed ^ (0xA076_1D64_78BD_642F_u64.wrapping_mul(replicate as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Percentile-bootstrap CIs for both endpoints of one estimand.
pub fn bootstrap_ci(
    records: &[TrialRecord],
    scenario: &ScenarioSpec,
    estimand: Estimand,
    method: BoundMethod,
    config: &BootstrapConfig,
    options: &BoundOptions,
) -> Result<EndpointCi, InferenceError> {
    bootstrap_ci_impl(records, scenario, estimand, method, config, options, true)
}

/// Sequential twin of [`bootstrap_ci`]; used by the bench suite.
pub fn bootstrap_ci_seq(
    records: &[TrialRecord],
    scenario: &ScenarioSpec,
    estimand: Estimand,
    method: BoundMethod,
    config: &BootstrapConfig,
    options: &BoundOptions,
) -> Result<EndpointCi, InferenceError> {
    bootstrap_ci_impl(records, scenario, estimand, method, config, options, false)
}

#[allow(clippy::too_many_arguments)]
fn bootstrap_ci_impl(
    records: &[TrialRecord],
    scenario: &ScenarioSpec,
    estimand: Estimand,
    method: BoundMethod,
    config: &BootstrapConfig,
    options: &BoundOptions,
    parallel: bool,
) -> Result<EndpointCi, InferenceError> {
    config.validate()?;
    if records.is_empty() {
        return Err(InferenceError::BadConfig("no records".into()));
    }
    // Verify the point estimate computes at all before resampling.
    let base = estimate_observed(records)?;
    interval_for(&base, scenario, estimand, method, options)?;

    let one_replicate = |r: usize| -> Option<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(config.seed, r));
        let sample = resample(records, &mut rng, config.stratify_arm);
        let obs = estimate_observed(&sample).ok()?;
        let interval = interval_for(&obs, scenario, estimand, method, options).ok()?;
        Some((interval.lower.as_f64(), interval.upper_f64()))
    };
    let draws: Vec<Option<(f64, f64)>> = if parallel {
        par::map_indexed(config.replicates, one_replicate)
    } else {
        par::map_indexed_seq(config.replicates, one_replicate)
    };

    let failures = draws.iter().filter(|d| d.is_none()).count();
    if failures * 5 > config.replicates {
        return Err(InferenceError::TooManyFailures {
            failed: failures,
            total: config.replicates,
        });
    }
    let mut lowers: Vec<f64> = draws.iter().flatten().map(|d| d.0).collect();
    let mut uppers: Vec<f64> = draws.iter().flatten().map(|d| d.1).collect();
    lowers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    uppers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo_p = config.alpha / 2.0;
    let hi_p = 1.0 - config.alpha / 2.0;
    Ok(EndpointCi {
        lower_ci: (quantile_type7(&lowers, lo_p), quantile_type7(&lowers, hi_p)),
        upper_ci: (quantile_type7(&uppers, lo_p), quantile_type7(&uppers, hi_p)),
        failures,
        replicates_used: config.replicates - failures,
    })
}

// ----- coverage study ----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageRow {
    pub figure: crate::bounds::Figure,
    pub n: usize,
    pub estimand: Estimand,
    pub method: BoundMethod,
    pub endpoint: EndpointSide,
    pub coverage: f64,
    /// Replications whose bootstrap failed outright and were excluded.
    pub failed_replications: usize,
}

/// Draw `reps` finite samples of size `n` from the generating process,
/// bootstrap each, and report how often each endpoint CI covers the
/// population endpoint recovered from the full table in `config`.
pub fn coverage_study(
    config: &DgmConfig,
    n: usize,
    reps: usize,
    boot: &BootstrapConfig,
    scenario: &ScenarioSpec,
    estimands: &[Estimand],
    methods: &[BoundMethod],
    options: &BoundOptions,
) -> Result<Vec<CoverageRow>, InferenceError> {
    boot.validate()?;
    let include_event = scenario.figure != crate::bounds::Figure::Fig2;

    // Population truth at the configured (large) n.
    let population = generate(config);
    let truth = population_endpoints(&population, scenario, estimands, methods, options)?;

    // Outer replications in parallel; inner bootstrap sequential to avoid
    // nested pools.
    let per_rep = par::map_indexed(reps, |rep| {
        let mut sample_cfg = *config;
        sample_cfg.n = n;
        sample_cfg.seed = replicate_seed(config.seed ^ 0x5EED, rep);
        let table = generate(&sample_cfg);
        let records = table.observed_records(include_event);
        let mut rep_boot = *boot;
        rep_boot.seed = replicate_seed(boot.seed, rep);
        let mut hits: Vec<Option<(bool, bool)>> = Vec::new();
        for &(estimand, method, ref true_lo, ref true_hi) in &truth {
            let ci = bootstrap_ci_seq(&records, scenario, estimand, method, &rep_boot, options);
            match ci {
                Ok(ci) => {
                    let covers_lower = ci.lower_ci.0 <= *true_lo && *true_lo <= ci.lower_ci.1;
                    let covers_upper = ci.upper_ci.0 <= *true_hi && *true_hi <= ci.upper_ci.1;
                    hits.push(Some((covers_lower, covers_upper)));
                }
                Err(_) => hits.push(None),
            }
        }
        hits
    });

    let mut rows = Vec::new();
    for (idx, &(estimand, method, _, _)) in truth.iter().enumerate() {
        let mut lower_hits = 0usize;
        let mut upper_hits = 0usize;
        let mut used = 0usize;
        for rep in &per_rep {
            match rep[idx] {
                Some((l, u)) => {
                    used += 1;
                    lower_hits += l as usize;
                    upper_hits += u as usize;
                }
                None => {}
            }
        }
        let failed = reps - used;
        let denom = used.max(1) as f64;
        rows.push(CoverageRow {
            figure: scenario.figure,
            n,
            estimand,
            method,
            endpoint: EndpointSide::Lower,
            coverage: lower_hits as f64 / denom,
            failed_replications: failed,
        });
        rows.push(CoverageRow {
            figure: scenario.figure,
            n,
            estimand,
            method,
            endpoint: EndpointSide::Upper,
            coverage: upper_hits as f64 / denom,
            failed_replications: failed,
        });
    }
    Ok(rows)
}

type TruthRow = (Estimand, BoundMethod, f64, f64);

fn population_endpoints(
    population: &PotentialTable,
    scenario: &ScenarioSpec,
    estimands: &[Estimand],
    methods: &[BoundMethod],
    options: &BoundOptions,
) -> Result<Vec<TruthRow>, InferenceError> {
    let include_event = scenario.figure != crate::bounds::Figure::Fig2;
    let obs = population.observed_distribution(include_event)?;
    let mut out = Vec::new();
    for &estimand in estimands {
        for &method in methods {
            let interval = interval_for(&obs, scenario, estimand, method, options)?;
            out.push((
                estimand,
                method,
                interval.lower.as_f64(),
                interval.upper_f64(),
            ));
        }
    }
    Ok(out)
}

/// CSV rendering of a coverage table: `figure,n,estimand,method,endpoint,coverage`.
pub fn coverage_csv(rows: &[CoverageRow]) -> String {
    let mut out = String::from("figure,n,estimand,method,endpoint,coverage,failed_replications\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.4},{}\n",
            json_name(&row.figure),
            row.n,
            json_name(&row.estimand),
            json_name(&row.method),
            json_name(&row.endpoint),
            row.coverage,
            row.failed_replications
        ));
    }
    out
}

fn json_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(|s| s.to_string()))
        .unwrap_or_default()
}
