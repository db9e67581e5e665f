//! `afc gradcheck`: coefficient gradients of the polynomial activation
//! against central finite differences.

use afc_core::layers::{poly_coeff_gradient, poly_eval, PolyActivation};
use afc_core::Tensor3;
use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::{Format, Resolved};
use crate::reports::{self, SCHEMA};

pub const TOLERANCE: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Serialize)]
struct CaseRow {
    case: usize,
    scale: f64,
    max_rel_error: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    experiment: &'static str,
    seed: u64,
    cases: usize,
    fd_step: f64,
    tolerance: f64,
    max_rel_error: f64,
    per_case: Vec<CaseRow>,
    pass: bool,
}

#[allow(clippy::needless_range_loop)]
pub fn run(resolved: &Resolved) -> Result<(String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(resolved.seed);
    let mut per_case = Vec::with_capacity(resolved.samples);
    let mut overall: f64 = 0.0;

    for case in 0..resolved.samples {
        let channels = 1 + (case % 3);
        let scale = if case % 2 == 0 { 1.0 } else { 7.0 };
        let (h, w) = (6usize, 6usize);
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len).map(|_| rng.sample(StandardNormal)).collect()
        };
        let x = Tensor3::new(channels, h, w, draw(channels * h * w)).unwrap();
        let upstream = Tensor3::new(channels, h, w, draw(channels * h * w)).unwrap();
        let coeffs: Vec<[f64; 3]> = (0..channels)
            .map(|_| {
                [
                    0.5 * rng.sample::<f64, _>(StandardNormal),
                    0.5 * rng.sample::<f64, _>(StandardNormal),
                    0.5 * rng.sample::<f64, _>(StandardNormal),
                ]
            })
            .collect();
        let p = PolyActivation::new(coeffs, scale).map_err(|e| anyhow::anyhow!("{e}"))?;
        let grads = poly_coeff_gradient(&x, &p, &upstream).map_err(|e| anyhow::anyhow!("{e}"))?;

        let loss = |p: &PolyActivation| -> f64 {
            poly_eval(&x, p)
                .unwrap()
                .data()
                .iter()
                .zip(upstream.data())
                .map(|(a, b)| a * b)
                .sum()
        };

        let mut case_max: f64 = 0.0;
        for ch in 0..channels {
            for k in 0..3 {
                let mut hi = p.clone();
                hi.coeffs_mut()[ch][k] += FD_STEP;
                let mut lo = p.clone();
                lo.coeffs_mut()[ch][k] -= FD_STEP;
                let fd = (loss(&hi) - loss(&lo)) / (2.0 * FD_STEP);
                let rel = (grads[ch][k] - fd).abs() / fd.abs().max(1e-9);
                case_max = case_max.max(rel);
            }
        }
        overall = overall.max(case_max);
        per_case.push(CaseRow { case, scale, max_rel_error: case_max });
    }

    let pass = overall < TOLERANCE;
    let report = Report {
        schema: SCHEMA,
        experiment: "gradcheck",
        seed: resolved.seed,
        cases: resolved.samples,
        fd_step: FD_STEP,
        tolerance: TOLERANCE,
        max_rel_error: overall,
        per_case,
        pass,
    };

    let text = match resolved.format {
        Format::Json => reports::to_sorted_json(&report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .per_case
                .iter()
                .map(|r| {
                    vec![
                        format!("{}", r.case),
                        format!("{}", r.scale),
                        format!("{:e}", r.max_rel_error),
                    ]
                })
                .collect();
            reports::to_csv(&["case", "scale", "max_rel_error"], &rows)
        }
    };
    Ok((text, pass))
}
