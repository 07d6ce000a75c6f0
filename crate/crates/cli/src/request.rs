//! Request assembly: flag parsing, JSON config merging, and the scenario
//! invariant checks that must fail before any computation starts.

use std::path::PathBuf;

use serde::Deserialize;

use vebounds::bounds::{AMonotone, BoundMethod, Figure, MMonotone, ScenarioSpec, UMonotone};
use vebounds::Estimand;

use crate::BoundsArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Lp,
    Monotone,
    Both,
}

/// JSON form of the `bounds` options; every field optional, flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsFileConfig {
    input: Option<PathBuf>,
    scenario: Option<String>,
    assume: Option<Vec<String>>,
    method: Option<String>,
    estimand: Option<String>,
    format: Option<String>,
    boot: Option<usize>,
    alpha: Option<f64>,
    seed: Option<u64>,
    stratify_arm: Option<bool>,
    verify_lp: Option<bool>,
    allow_empty_stratum: Option<bool>,
}

#[derive(Debug)]
pub struct BoundsRequest {
    pub input: Option<PathBuf>,
    scenario_name: String,
    assume: Vec<String>,
    method: MethodChoice,
    pub estimands: Vec<Estimand>,
    pub format: OutputFormat,
    pub boot: Option<usize>,
    pub alpha: f64,
    pub seed: u64,
    pub stratify_arm: bool,
    pub verify_lp: bool,
    pub allow_empty_stratum: bool,
}

impl BoundsRequest {
    pub fn from_args_and_config(args: &BoundsArgs) -> anyhow::Result<Self> {
        let file: BoundsFileConfig = match &args.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => BoundsFileConfig::default(),
        };
        let assume = if args.assume.is_empty() {
            file.assume.unwrap_or_default()
        } else {
            args.assume.clone()
        };
        let estimand_spec = args
            .estimand
            .clone()
            .or(file.estimand)
            .unwrap_or_else(|| "ve0,ve1,vet".to_string());
        let format = match args
            .format
            .clone()
            .or(file.format)
            .unwrap_or_else(|| "table".to_string())
            .as_str()
        {
            "table" => OutputFormat::Table,
            "json" => OutputFormat::Json,
            other => anyhow::bail!("unknown format `{other}` (use table or json)"),
        };
        let seed = args
            .seed
            .or(file.seed)
            .or_else(crate::env_seed)
            .unwrap_or(0);
        Ok(BoundsRequest {
            input: args.input.clone().or(file.input),
            scenario_name: args
                .scenario
                .clone()
                .or(file.scenario)
                .unwrap_or_else(|| "fig2".to_string()),
            assume,
            method: parse_methods(
                args.method
                    .clone()
                    .or(file.method)
                    .unwrap_or_else(|| "lp".to_string())
                    .as_str(),
            )?,
            estimands: parse_estimands(&estimand_spec)?,
            format,
            boot: args.boot.or(file.boot),
            alpha: args.alpha.or(file.alpha).unwrap_or(0.05),
            seed,
            stratify_arm: args.stratify_arm || file.stratify_arm.unwrap_or(false),
            verify_lp: args.verify_lp || file.verify_lp.unwrap_or(false),
            allow_empty_stratum: args.allow_empty_stratum
                || file.allow_empty_stratum.unwrap_or(false),
        })
    }

    pub fn scenario(&self) -> anyhow::Result<ScenarioSpec> {
        build_scenario(&self.scenario_name, &self.assume)
    }

    /// Methods applied to one estimand: the blinded contrast is always a
    /// point value; everything else follows the method choice.
    pub fn methods_for(&self, estimand: Estimand) -> Vec<BoundMethod> {
        if estimand == Estimand::VeMinus1 {
            return vec![BoundMethod::Point];
        }
        match self.method {
            MethodChoice::Lp => vec![BoundMethod::Lp],
            MethodChoice::Monotone => vec![BoundMethod::Monotone],
            MethodChoice::Both => vec![BoundMethod::Lp, BoundMethod::Monotone],
        }
    }
}

pub fn parse_figure(name: &str) -> anyhow::Result<Figure> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "fig2" | "2" => Figure::Fig2,
        "fig3a" | "3a" => Figure::Fig3a,
        "fig3b" | "3b" => Figure::Fig3b,
        "fig3c" | "3c" => Figure::Fig3c,
        "fig3d" | "3d" => Figure::Fig3d,
        other => anyhow::bail!("unknown scenario `{other}` (fig2, fig3a, fig3b, fig3c, fig3d)"),
    })
}

pub fn build_scenario(name: &str, assume: &[String]) -> anyhow::Result<ScenarioSpec> {
    let mut scenario = ScenarioSpec::new(parse_figure(name)?);
    for item in assume {
        match item.trim() {
            "m=+" => scenario.m_monotone = MMonotone::NonNeg,
            "m=-" => scenario.m_monotone = MMonotone::NonPos,
            "m=0" => scenario.m_monotone = MMonotone::None,
            "u=i" => scenario.u_monotone = UMonotone::Concordant,
            "u=ii" => scenario.u_monotone = UMonotone::Discordant,
            "u=0" => scenario.u_monotone = UMonotone::None,
            "a=+" => scenario.a_monotone = AMonotone::NonNeg,
            "a=-" => scenario.a_monotone = AMonotone::NonPos,
            "a=0" => scenario.a_monotone = AMonotone::None,
            other => anyhow::bail!(
                "unknown assumption `{other}` (m=+, m=-, u=i, u=ii, a=+, a=-)"
            ),
        }
    }
    scenario.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(scenario)
}

pub fn parse_methods(name: &str) -> anyhow::Result<MethodChoice> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "lp" => MethodChoice::Lp,
        "monotone" | "mon" => MethodChoice::Monotone,
        "both" => MethodChoice::Both,
        other => anyhow::bail!("unknown method `{other}` (lp, monotone, both)"),
    })
}

pub fn parse_estimands(spec: &str) -> anyhow::Result<Vec<Estimand>> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim().to_ascii_lowercase();
        if token.is_empty() {
            continue;
        }
        if token == "all" {
            return Ok(Estimand::ALL.to_vec());
        }
        let estimand = match token.as_str() {
            "veminus1" | "ve-1" | "vem1blind" => Estimand::VeMinus1,
            "ve0" => Estimand::Ve0,
            "ve1" => Estimand::Ve1,
            "vet" | "ve_t" => Estimand::VeT,
            "vem0" | "ve_m0" => Estimand::VeM0,
            "vem1" | "ve_m1" => Estimand::VeM1,
            "bdiff0" => Estimand::BehavioralDiff0,
            "bdiff1" => Estimand::BehavioralDiff1,
            "idiff0" => Estimand::ImmunologicalDiff0,
            "idiff1" => Estimand::ImmunologicalDiff1,
            "tdiff" => Estimand::TotalDiff,
            other => anyhow::bail!("unknown estimand `{other}`"),
        };
        out.push(estimand);
    }
    if out.is_empty() {
        anyhow::bail!("no estimands requested");
    }
    Ok(out)
}
