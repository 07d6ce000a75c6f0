//! Command-line interface: bound estimation, trial simulation, bootstrap
//! coverage studies, and the formula-vs-program validation suite.

mod render;
mod request;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vebounds::bounds::{BoundMethod, BoundOptions, BoundsRecord};
use vebounds::inference::{bootstrap_ci, coverage_csv, coverage_study, BootstrapConfig};
use vebounds::observed::{estimate_observed, read_records};
use vebounds::response_types::enumerate_types;
use vebounds::simulate::{generate, DgmConfig};
use vebounds::validation::{self, ValidationOptions};
use vebounds::Estimand;

use request::{parse_estimands, parse_methods, MethodChoice, OutputFormat};

#[derive(Parser)]
#[command(
    name = "vebounds",
    about = "Nonparametric bounds on vaccine-efficacy estimands under broken blinding",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate bound intervals from a trial dataset.
    Bounds(BoundsArgs),
    /// Generate a synthetic trial and its ground-truth sidecar.
    Simulate(SimulateArgs),
    /// Bootstrap coverage study against population truth.
    Coverage(CoverageArgs),
    /// Cross-validate closed-form bounds against the numeric programs.
    #[command(name = "validate-lp")]
    ValidateLp(ValidateArgs),
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Input CSV (micro rows `a,b[,s],y` or counts `a,b[,s],y,count`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// JSON config carrying the same options as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Causal scenario: fig2, fig3a, fig3b, fig3c, fig3d.
    #[arg(long)]
    scenario: Option<String>,
    /// Assumption flags, repeatable: m=+, m=-, u=i, u=ii, a=+, a=-.
    #[arg(long = "assume")]
    assume: Vec<String>,
    /// Bound method: lp, monotone, or both.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated estimands (ve0,ve1,vet,vem0,vem1,veminus1,
    /// bdiff0,bdiff1,idiff0,idiff1,tdiff or `all`).
    #[arg(long)]
    estimand: Option<String>,
    /// Output format: table or json.
    #[arg(long)]
    format: Option<String>,
    /// Bootstrap replicates for endpoint confidence intervals.
    #[arg(long)]
    boot: Option<usize>,
    /// Bootstrap CI level alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// RNG seed (overrides VEBOUNDS_SEED).
    #[arg(long)]
    seed: Option<u64>,
    /// Resample within arms instead of iid rows.
    #[arg(long)]
    stratify_arm: bool,
    /// Re-derive every closed-form interval with the numeric programs.
    #[arg(long)]
    verify_lp: bool,
    /// Skip event strata that fail positivity instead of erroring.
    #[arg(long)]
    allow_empty_stratum: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON file holding a DgmConfig; overrides below apply on top.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generate under a named figure with default coefficients.
    #[arg(long)]
    figure: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path for the observed dataset.
    #[arg(long)]
    out: PathBuf,
    /// Output JSON path for the ground-truth sidecar.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Omit the adverse-event column.
    #[arg(long)]
    no_s: bool,
    /// Emit aggregated counts instead of micro rows.
    #[arg(long)]
    aggregate: bool,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    figure: Option<String>,
    /// Sample size per replication.
    #[arg(long, default_value_t = 5000)]
    n: usize,
    /// Number of outer replications.
    #[arg(long, default_value_t = 500)]
    reps: usize,
    /// Bootstrap replicates per replication.
    #[arg(long, default_value_t = 200)]
    boot: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Population size used to recover the true bounds.
    #[arg(long, default_value_t = 1_000_000)]
    population: usize,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long = "assume")]
    assume: Vec<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    estimand: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stratify_arm: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Number of random distributions per check.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the response-type tables as CSV and exit.
    #[arg(long)]
    dump_tables: bool,
}

fn env_seed() -> Option<u64> {
    std::env::var("VEBOUNDS_SEED").ok()?.parse().ok()
}

fn effective_seed(flag: Option<u64>) -> u64 {
    flag.or_else(env_seed).unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => run_bounds(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Coverage(args) => run_coverage(args),
        Command::ValidateLp(args) => run_validate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run_bounds(args: BoundsArgs) -> anyhow::Result<ExitCode> {
    let request = request::BoundsRequest::from_args_and_config(&args)?;
    let input = request
        .input
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("--input is required (or `input` in --config)"))?;
    let file = fs::File::open(input)
        .map_err(|e| anyhow::anyhow!("cannot open {}: {e}", input.display()))?;
    let records = read_records(file)?;
    let obs = estimate_observed(&records)?;

    let scenario = request.scenario()?;
    scenario.validate()?;
    let options = BoundOptions {
        allow_empty_stratum: request.allow_empty_stratum,
    };

    let mut results = Vec::new();
    let mut infeasible_requested = false;
    for &estimand in &request.estimands {
        for method in request.methods_for(estimand) {
            let interval = match method {
                BoundMethod::Lp => {
                    if request.verify_lp {
                        let closed =
                            vebounds::bounds::lp_bounds_opt(&obs, &scenario, estimand, &options)?;
                        let numeric = vebounds::bounds::lp_bounds_numeric_opt(
                            &obs, &scenario, estimand, &options,
                        )?;
                        anyhow::ensure!(
                            closed == numeric,
                            "closed-form and numeric LP intervals disagree for {estimand:?}"
                        );
                        closed
                    } else {
                        vebounds::bounds::lp_bounds_opt(&obs, &scenario, estimand, &options)?
                    }
                }
                BoundMethod::Monotone => {
                    vebounds::bounds::monotone_bounds_opt(&obs, &scenario, estimand, &options)?
                }
                BoundMethod::Point => {
                    let v = vebounds::bounds::blinded_point_value(&obs)?;
                    vebounds::bounds::Interval {
                        lower: vebounds::bounds::Endpoint::Finite(v.clone()),
                        upper: v,
                        feasible: true,
                        method: BoundMethod::Point,
                    }
                }
            };
            if !interval.feasible {
                infeasible_requested = true;
            }
            let mut result =
                vebounds::bounds::BoundsResult::from_interval(estimand, &scenario, interval);
            if estimand == Estimand::VeMinus1 {
                result.point_estimate = result.lower.finite().cloned();
            }
            if let Some(replicates) = request.boot {
                let config = BootstrapConfig {
                    replicates,
                    alpha: request.alpha,
                    seed: request.seed,
                    stratify_arm: request.stratify_arm,
                };
                let ci = bootstrap_ci(&records, &scenario, estimand, method, &config, &options)?;
                result.ci_lower = Some(ci.lower_ci);
                result.ci_upper = Some(ci.upper_ci);
            }
            results.push(result);
        }
    }

    let records_out: Vec<BoundsRecord> = results.iter().map(BoundsRecord::from).collect();
    match request.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&records_out)?),
        OutputFormat::Table => print!("{}", render::table(&records_out)),
    }
    Ok(if infeasible_requested {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_dgm(
    config: &Option<PathBuf>,
    figure: &Option<String>,
    n: Option<usize>,
    seed: Option<u64>,
) -> anyhow::Result<DgmConfig> {
    let mut dgm = if let Some(path) = config {
        let text = fs::read_to_string(path)?;
        serde_json::from_str::<DgmConfig>(&text)?
    } else {
        let figure = request::parse_figure(figure.as_deref().unwrap_or("fig3d"))?;
        DgmConfig::for_figure(figure, 1_000_000, 0)
    };
    if let Some(n) = n {
        dgm.n = n;
    }
    if let Some(seed) = seed.or_else(env_seed) {
        dgm.seed = seed;
    }
    Ok(dgm)
}

fn run_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let dgm = load_dgm(&args.config, &args.figure, args.n, args.seed)?;
    let table = generate(&dgm);
    let include_event = !args.no_s;

    let mut out = std::io::BufWriter::new(fs::File::create(&args.out)?);
    if args.aggregate {
        writeln!(out, "{}", if include_event { "a,b,s,y,count" } else { "a,b,y,count" })?;
        for r in table.observed_counts(include_event) {
            match r.adverse_event {
                Some(s) => {
                    writeln!(out, "{},{},{},{},{}", r.arm, r.belief, s, r.infected, r.weight)?
                }
                None => writeln!(out, "{},{},{},{}", r.arm, r.belief, r.infected, r.weight)?,
            }
        }
    } else {
        writeln!(out, "{}", if include_event { "a,b,s,y" } else { "a,b,y" })?;
        for r in table.observed_records(include_event) {
            match r.adverse_event {
                Some(s) => writeln!(out, "{},{},{},{}", r.arm, r.belief, s, r.infected)?,
                None => writeln!(out, "{},{},{}", r.arm, r.belief, r.infected)?,
            }
        }
    }
    out.flush()?;

    if let Some(truth_path) = args.truth {
        let truth = table.true_estimands();
        let mut values = serde_json::Map::new();
        for estimand in Estimand::ALL {
            if let Ok(v) = truth.value(estimand) {
                let name = serde_json::to_value(estimand)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string();
                values.insert(name, serde_json::json!(v));
            }
        }
        let sidecar = serde_json::json!({
            "config": dgm,
            "implied_figure": dgm.implied_figure(),
            "n": table.len(),
            "true_estimands": values,
        });
        fs::write(truth_path, serde_json::to_string_pretty(&sidecar)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_coverage(args: CoverageArgs) -> anyhow::Result<ExitCode> {
    let dgm = {
        let mut dgm = load_dgm(&args.config, &args.figure, None, args.seed)?;
        dgm.n = args.population;
        dgm
    };
    let scenario =
        request::build_scenario(args.scenario.as_deref().unwrap_or("fig3d"), &args.assume)?;
    scenario.validate()?;
    let estimands = parse_estimands(args.estimand.as_deref().unwrap_or("ve0,ve1,vet"))?;
    let methods = match parse_methods(args.method.as_deref().unwrap_or("both"))? {
        MethodChoice::Lp => vec![BoundMethod::Lp],
        MethodChoice::Monotone => vec![BoundMethod::Monotone],
        MethodChoice::Both => vec![BoundMethod::Lp, BoundMethod::Monotone],
    };
    let boot = BootstrapConfig {
        replicates: args.boot,
        alpha: args.alpha,
        seed: effective_seed(args.seed),
        stratify_arm: args.stratify_arm,
    };
    let rows = coverage_study(
        &dgm,
        args.n,
        args.reps,
        &boot,
        &scenario,
        &estimands,
        &methods,
        &BoundOptions::default(),
    )?;
    let csv = coverage_csv(&rows);
    match args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_validate(args: ValidateArgs) -> anyhow::Result<ExitCode> {
    if args.dump_tables {
        for b in 0..2u8 {
            println!("# response types, belief stratum b={b}");
            print!("{}", enumerate_types(b).to_csv());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let report = validation::run(&ValidationOptions {
        trials: args.trials,
        seed: effective_seed(args.seed).max(1),
        perturb_closed_form: None,
    });
    for check in &report.checks {
        println!(
            "{} {} (trials={}, max|discrepancy|={})",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.trials,
            check.max_abs_discrepancy
        );
    }
    if report.all_pass() {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        anyhow::bail!("validation failed");
    }
}
