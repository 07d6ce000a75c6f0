//! Table rendering. Ratio-scale values print as percentages with one
//! decimal; difference-scale values as percentage points. Lower bounds below
//! -1000% print as -inf in tables (the JSON output keeps the raw value), and
//! infeasible rows print dashes in place of endpoints.

use vebounds::bounds::{BoundMethod, BoundsRecord};
use vebounds::Estimand;

/// Display floor for lower bounds, on the raw (not percent) scale.
const LOWER_DISPLAY_FLOOR: f64 = -10.0;

fn estimand_label(estimand: Estimand) -> &'static str {
    match estimand {
        Estimand::VeMinus1 => "VE(-1)",
        Estimand::Ve0 => "VE(0)",
        Estimand::Ve1 => "VE(1)",
        Estimand::VeT => "VE_T",
        Estimand::VeM0 => "VE_M(0)",
        Estimand::VeM1 => "VE_M(1)",
        Estimand::BehavioralDiff0 => "Diff_M(0)",
        Estimand::BehavioralDiff1 => "Diff_M(1)",
        Estimand::ImmunologicalDiff0 => "Diff(0)",
        Estimand::ImmunologicalDiff1 => "Diff(1)",
        Estimand::TotalDiff => "Diff_T",
    }
}

fn method_label(method: BoundMethod) -> &'static str {
    match method {
        BoundMethod::Lp => "LP",
        BoundMethod::Monotone => "Monotone",
        BoundMethod::Point => "Point",
    }
}

fn percent(value: f64) -> String {
    format!("{:.1}", value * 100.0)
}

fn lower_cell(value: Option<f64>) -> String {
    match value {
        None => "-inf".to_string(),
        Some(v) if v < LOWER_DISPLAY_FLOOR => "-inf".to_string(),
        Some(v) => percent(v),
    }
}

fn ci_cell(ci: Option<(f64, f64)>) -> String {
    match ci {
        None => String::new(),
        Some((lo, hi)) => format!(
            " ({}, {})",
            lower_cell(Some(lo)),
            if hi < LOWER_DISPLAY_FLOOR {
                "-inf".to_string()
            } else {
                percent(hi)
            }
        ),
    }
}

pub fn table(records: &[BoundsRecord]) -> String {
    let mut rows: Vec<[String; 5]> = Vec::new();
    rows.push([
        "estimand".into(),
        "method".into(),
        "lower %".into(),
        "upper %".into(),
        "feasible".into(),
    ]);
    for r in records {
        let (lower, upper) = if r.feasible {
            (
                format!("{}{}", lower_cell(r.lower), ci_cell(r.ci_lower)),
                format!("{}{}", percent(r.upper), ci_cell(r.ci_upper)),
            )
        } else {
            ("---".to_string(), "---".to_string())
        };
        rows.push([
            estimand_label(r.estimand).to_string(),
            method_label(r.method).to_string(),
            lower,
            upper,
            if r.feasible { "yes" } else { "no" }.to_string(),
        ]);
    }
    let mut widths = [0usize; 5];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(widths.iter())
            .map(|(cell, w)| format!("{cell:>w$}", w = w))
            .collect();
        out.push_str(&line.join("  "));
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 8));
            out.push('\n');
        }
    }
    out
}
