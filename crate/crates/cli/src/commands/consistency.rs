//! `afc consistency`: fraction of inputs whose argmax prediction survives a
//! random translation drawn from the configured grid.

use afc_core::metrics::{self, ShiftChoice};
use afc_core::network::{build_network, Variant};
use anyhow::Result;
use serde::Serialize;

use crate::config::{Format, Resolved, INPUT_SEED_SALT};
use crate::reports::{self, INPUTS_NOTE, SCHEMA};

/// Maximum tolerated logit movement for the alias-free variant.
pub const AFC_LOGIT_TOL: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    experiment: &'static str,
    inputs: &'static str,
    seed: u64,
    samples: usize,
    variant: String,
    grid: serde_json::Value,
    consistency: f64,
    max_logit_deviation: f64,
    shifts: Vec<String>,
    /// Only the afc variant asserts anything; baseline numbers are recorded.
    asserted: bool,
    pass: bool,
}

pub fn run(resolved: &Resolved) -> Result<(String, bool)> {
    let net = build_network(&resolved.network).map_err(|e| anyhow::anyhow!("{e}"))?;
    let inputs = metrics::random_sanitized_inputs(
        resolved.seed ^ INPUT_SEED_SALT,
        resolved.samples,
        resolved.network.input_channels,
        resolved.network.input_size,
        resolved.network.input_size,
    );
    let grid = metrics::make_grid(resolved.grid).map_err(|e| anyhow::anyhow!("{e}"))?;
    let outcome = metrics::consistency(
        &net,
        &inputs,
        ShiftChoice::RandomFrom { grid: &grid, seed: resolved.seed },
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;

    let asserted = resolved.network.variant == Variant::Afc;
    let pass = if asserted {
        outcome.fraction == 1.0 && outcome.max_logit_dev < AFC_LOGIT_TOL
    } else {
        true
    };

    let report = Report {
        schema: SCHEMA,
        experiment: "consistency",
        inputs: INPUTS_NOTE,
        seed: resolved.seed,
        samples: resolved.samples,
        variant: resolved.network.variant.to_string(),
        grid: serde_json::to_value(grid.kind)?,
        consistency: outcome.fraction,
        max_logit_deviation: outcome.max_logit_dev,
        shifts: outcome.shifts.clone(),
        asserted,
        pass,
    };

    let text = match resolved.format {
        Format::Json => reports::to_sorted_json(&report)?,
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .shifts
                .iter()
                .enumerate()
                .map(|(i, s)| vec![format!("{i}"), s.clone()])
                .collect();
            rows.push(vec!["consistency".into(), format!("{}", report.consistency)]);
            reports::to_csv(&["sample", "shift"], &rows)
        }
    };
    Ok((text, pass))
}
