//! `afc verify-spectral`: every resampling kernel against its oracle over
//! seeded random signals.

use afc_core::oracle;
use afc_core::spectral::{self, Cutoff};
use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::config::{Format, Resolved};
use crate::reports::{self, INPUTS_NOTE, SCHEMA};

pub const DEFAULT_SIZES: [usize; 8] = [2, 3, 4, 5, 8, 15, 16, 32];
pub const TOLERANCE: f64 = 1e-9;

/// Which kernel the corruption hook perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptMask {
    Lowpass,
    Upsample,
}

impl CorruptMask {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lowpass" => Ok(Self::Lowpass),
            "upsample" => Ok(Self::Upsample),
            other => anyhow::bail!("unknown kernel {other:?}, expected lowpass or upsample"),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Lowpass => "lowpass",
            Self::Upsample => "upsample",
        }
    }
}

#[derive(Debug, Serialize)]
struct FailingCase {
    n: usize,
    params: String,
    deviation: f64,
    signal: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct KernelResult {
    cases: usize,
    max_abs_deviation: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_failure: Option<FailingCase>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    experiment: &'static str,
    inputs: &'static str,
    seed: u64,
    sizes: Vec<usize>,
    cases_per_size: usize,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    corruption_hook: Option<&'static str>,
    kernels: BTreeMap<&'static str, KernelResult>,
    pass: bool,
}

struct Tracker {
    cases: usize,
    max_dev: f64,
    worst_failure: Option<FailingCase>,
}

impl Tracker {
    fn new() -> Self {
        Self { cases: 0, max_dev: 0.0, worst_failure: None }
    }

    fn record(&mut self, n: usize, params: String, signal: &[f64], dev: f64) {
        self.cases += 1;
        if dev > self.max_dev {
            self.max_dev = dev;
            if dev >= TOLERANCE {
                self.worst_failure = Some(FailingCase {
                    n,
                    params,
                    deviation: dev,
                    signal: signal.to_vec(),
                });
            }
        }
    }

    fn into_result(self) -> KernelResult {
        KernelResult {
            cases: self.cases,
            max_abs_deviation: self.max_dev,
            pass: self.max_dev < TOLERANCE,
            worst_failure: self.worst_failure,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Applies `gains` to `x` through the naive DFT (the oracle side of the mask
/// comparisons).
fn naive_apply(x: &[f64], gains: &[f64]) -> Vec<f64> {
    let mut spec = oracle::naive_dft(&oracle::to_complex(x));
    for (v, &g) in spec.iter_mut().zip(gains) {
        *v *= g;
    }
    oracle::naive_idft(&spec).iter().map(|c| c.re).collect()
}

/// Flips one mask gain so the comparison fails; exercises the failure path.
fn corrupt_gains(gains: &mut [f64]) {
    if gains.len() > 1 {
        gains[1] = 1.0 - gains[1];
    } else {
        gains[0] = 0.0;
    }
}

pub fn run(
    resolved: &Resolved,
    sizes: &[usize],
    cases_per_size: usize,
    corrupt: Option<CorruptMask>,
) -> Result<(String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(resolved.seed);
    let cutoffs = [
        Cutoff::new(1, 4).unwrap(),
        Cutoff::new(1, 3).unwrap(),
        Cutoff::new(1, 2).unwrap(),
        Cutoff::new(2, 3).unwrap(),
        Cutoff::new(3, 4).unwrap(),
        Cutoff::full(),
    ];
    let shifts: [(i64, usize); 7] = [(1, 1), (-2, 1), (1, 2), (-1, 2), (1, 3), (2, 3), (5, 4)];

    let mut lowpass = Tracker::new();
    let mut upsample = Tracker::new();
    let mut downsample = Tracker::new();
    let mut fractional = Tracker::new();

    for &n in sizes {
        for _ in 0..cases_per_size {
            let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();

            for c in cutoffs {
                let fast = spectral::ideal_lpf_1d(&x, c);
                let mut gains = spectral::lowpass_mask(n, c).gains().to_vec();
                if corrupt == Some(CorruptMask::Lowpass) {
                    corrupt_gains(&mut gains);
                }
                let slow = naive_apply(&x, &gains);
                lowpass.record(n, format!("cutoff={}/{}", c.num(), c.den()), &x, max_abs_diff(&fast, &slow));
            }

            for factor in [2usize, 3, 4] {
                let fast = spectral::upsample_1d(&x, factor)?;
                let slow = if corrupt == Some(CorruptMask::Upsample) {
                    let mut gains = spectral::upsample_mask(n, factor)?.gains().to_vec();
                    corrupt_gains(&mut gains);
                    let mut stuffed = vec![0.0; n * factor];
                    for (i, &v) in x.iter().enumerate() {
                        stuffed[i * factor] = v;
                    }
                    naive_apply(&stuffed, &gains)
                        .iter()
                        .map(|v| v * factor as f64)
                        .collect()
                } else {
                    oracle::sinc_upsample(&x, factor)
                };
                upsample.record(n, format!("factor={factor}"), &x, max_abs_diff(&fast, &slow));
            }

            for s in [2usize, 3, 4] {
                if n % s != 0 {
                    continue;
                }
                let fast = spectral::downsample_1d(&x, s)?;
                let gains = spectral::lowpass_mask(n, Cutoff::for_stride(s)?).gains().to_vec();
                let slow: Vec<f64> = naive_apply(&x, &gains).into_iter().step_by(s).collect();
                downsample.record(n, format!("stride={s}"), &x, max_abs_diff(&fast, &slow));
            }

            let clean = spectral::nyquist_sanitize_1d(&x);
            for &(m, d) in &shifts {
                let fast = spectral::fractional_shift_1d(&clean, m, d)?;
                let slow = oracle::oracle_shift(&clean, m as f64 / d as f64);
                fractional.record(n, format!("shift={m}/{d}"), &clean, max_abs_diff(&fast, &slow));
            }
        }
    }

    let mut kernels = BTreeMap::new();
    kernels.insert("lowpass", lowpass.into_result());
    kernels.insert("upsample", upsample.into_result());
    kernels.insert("downsample", downsample.into_result());
    kernels.insert("fractional-shift", fractional.into_result());
    let pass = kernels.values().all(|k| k.pass);

    let report = Report {
        schema: SCHEMA,
        experiment: "verify-spectral",
        inputs: INPUTS_NOTE,
        seed: resolved.seed,
        sizes: sizes.to_vec(),
        cases_per_size,
        tolerance: TOLERANCE,
        corruption_hook: corrupt.map(CorruptMask::name),
        kernels,
        pass,
    };

    let text = match resolved.format {
        Format::Json => reports::to_sorted_json(&report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .kernels
                .iter()
                .map(|(name, k)| {
                    vec![
                        name.to_string(),
                        format!("{}", k.cases),
                        format!("{:e}", k.max_abs_deviation),
                        k.pass.to_string(),
                    ]
                })
                .collect();
            reports::to_csv(&["kernel", "cases", "max_abs_deviation", "pass"], &rows)
        }
    };
    Ok((text, pass))
}

/// Lines naming each failing kernel, printed to stderr on failure.
pub fn failure_summary(report_json: &str) -> Vec<String> {
    let Ok(value) = serde_json::from_str::<serde_json::Value>(report_json) else {
        return vec![];
    };
    let mut out = Vec::new();
    if let Some(kernels) = value.get("kernels").and_then(|k| k.as_object()) {
        for (name, k) in kernels {
            if k.get("pass").and_then(|p| p.as_bool()) == Some(false) {
                let dev = k
                    .get("max_abs_deviation")
                    .and_then(|d| d.as_f64())
                    .unwrap_or(f64::NAN);
                out.push(format!("kernel {name} exceeded tolerance: max deviation {dev:e}"));
            }
        }
    }
    out
}
