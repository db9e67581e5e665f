//! `afc adversarial`: accuracy under every translation in a grid, with
//! labels defined by a frozen seeded teacher network so no dataset is needed.

use afc_core::metrics::{self, argmax};
use afc_core::network::{build_network, Variant};
use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, Resolved, INPUT_SEED_SALT, TEACHER_SEED_SALT};
use crate::reports::{self, INPUTS_NOTE, SCHEMA};

#[derive(Debug, Serialize)]
struct ShiftRow {
    shift: String,
    accuracy: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    experiment: &'static str,
    inputs: &'static str,
    seed: u64,
    teacher_seed: u64,
    samples: usize,
    variant: String,
    grid: serde_json::Value,
    grid_size: usize,
    clean_accuracy: f64,
    adversarial_accuracy: f64,
    per_shift: Vec<ShiftRow>,
    asserted: bool,
    pass: bool,
}

pub fn run(resolved: &Resolved) -> Result<(String, bool)> {
    let student = build_network(&resolved.network).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut teacher_spec = resolved.network.clone();
    teacher_spec.seed = resolved.network.seed.wrapping_add(TEACHER_SEED_SALT);
    let teacher = build_network(&teacher_spec).map_err(|e| anyhow::anyhow!("{e}"))?;

    let inputs = metrics::random_sanitized_inputs(
        resolved.seed ^ INPUT_SEED_SALT,
        resolved.samples,
        resolved.network.input_channels,
        resolved.network.input_size,
        resolved.network.input_size,
    );
    let labels: Vec<usize> = inputs
        .par_iter()
        .map(|x| teacher.logits(x).map(|l| argmax(&l)))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let grid = metrics::make_grid(resolved.grid).map_err(|e| anyhow::anyhow!("{e}"))?;
    let clean = metrics::clean_accuracy(&student, &inputs, &labels)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let adversarial = metrics::adversarial_accuracy(&student, &inputs, &labels, &grid)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    // Per-shift accuracies for the CSV/plot view.
    let per_shift: Vec<ShiftRow> = grid
        .shifts
        .par_iter()
        .map(|shift| -> std::result::Result<ShiftRow, afc_core::Error> {
            let mut correct = 0usize;
            for (x, &label) in inputs.iter().zip(&labels) {
                let moved = afc_core::spectral::fractional_shift_2d(x, shift)?;
                if argmax(&student.logits(&moved)?) == label {
                    correct += 1;
                }
            }
            Ok(ShiftRow {
                shift: shift.to_string(),
                accuracy: correct as f64 / inputs.len() as f64,
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let asserted = resolved.network.variant == Variant::Afc;
    let pass = if asserted { adversarial == clean } else { true };

    let report = Report {
        schema: SCHEMA,
        experiment: "adversarial",
        inputs: INPUTS_NOTE,
        seed: resolved.seed,
        teacher_seed: teacher_spec.seed,
        samples: resolved.samples,
        variant: resolved.network.variant.to_string(),
        grid: serde_json::to_value(grid.kind)?,
        grid_size: grid.shifts.len(),
        clean_accuracy: clean,
        adversarial_accuracy: adversarial,
        per_shift,
        asserted,
        pass,
    };

    let text = match resolved.format {
        Format::Json => reports::to_sorted_json(&report)?,
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = report
                .per_shift
                .iter()
                .map(|r| vec![r.shift.clone(), format!("{}", r.accuracy)])
                .collect();
            rows.push(vec!["clean".into(), format!("{}", report.clean_accuracy)]);
            rows.push(vec![
                "adversarial".into(),
                format!("{}", report.adversarial_accuracy),
            ]);
            reports::to_csv(&["shift", "accuracy"], &rows)
        }
    };
    Ok((text, pass))
}
