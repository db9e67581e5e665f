//! Quantitative instruments: the per-layer equivariance diff, shift
//! consistency, and adversarial accuracy over translation grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::spectral::{self, RationalShift};
use crate::tensor::Tensor3;

/// Epsilon added to the denominator of [`layer_diff`].
pub const DIFF_EPS: f64 = 1e-9;

/// Normalized mean elementwise difference,
/// `(1/CHW) * sum |y0 - y1| / (max(|y0|, |y1|) + eps)`.
///
/// Symmetric in its arguments, zero iff the tensors are equal, bounded by 2.
pub fn layer_diff(y0: &Tensor3, y1: &Tensor3, eps: f64) -> Result<f64> {
    if y0.shape() != y1.shape() {
        return Err(Error::shape(format!(
            "layer_diff shapes {:?} vs {:?}",
            y0.shape(),
            y1.shape()
        )));
    }
    let n = y0.len() as f64;
    let sum: f64 = y0
        .data()
        .iter()
        .zip(y1.data())
        .map(|(a, b)| (a - b).abs() / (a.abs().max(b.abs()) + eps))
        .sum();
    Ok(sum / n)
}

/// Families of translation grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum GridKind {
    /// Integer shifts `(i, j)`, `1 <= i, j <= bound`.
    Integer { bound: u32 },
    /// Half-pixel steps `(i/2, j/2)`, `1 <= i, j <= bound`.
    Half { bound: u32 },
    /// All reduced fractions `(m1/n1, m2/n2)`, `1 <= m <= n <= max_den`.
    Fractional { max_den: u32 },
}

/// A deduplicated, deterministically ordered set of non-zero shifts.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftGrid {
    pub kind: GridKind,
    #[serde(serialize_with = "serialize_shifts")]
    pub shifts: Vec<RationalShift>,
}

fn serialize_shifts<S: serde::Serializer>(
    shifts: &[RationalShift],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(shifts.iter().map(|v| v.to_string()))
}

/// Enumerates the grid for `kind`: every element reduced to lowest terms,
/// duplicates collapsed, `(0, 0)` excluded, deterministic order.
pub fn make_grid(kind: GridKind) -> Result<ShiftGrid> {
    let axis: Vec<(i64, u64)> = match kind {
        GridKind::Integer { bound } => {
            check_bound(bound)?;
            (1..=bound as i64).map(|i| (i, 1)).collect()
        }
        GridKind::Half { bound } => {
            check_bound(bound)?;
            (1..=bound as i64).map(|i| (i, 2)).collect()
        }
        GridKind::Fractional { max_den } => {
            check_bound(max_den)?;
            let mut vals = BTreeSet::new();
            for n in 1..=max_den as i64 {
                for m in 1..=n {
                    let g = gcd_i64(m, n);
                    vals.insert((m / g, (n / g) as u64));
                }
            }
            vals.into_iter().collect()
        }
    };
    let mut set = BTreeSet::new();
    for &(m1, n1) in &axis {
        for &(m2, n2) in &axis {
            let s = RationalShift::new(m1, n1, m2, n2)?;
            if !s.is_zero() {
                set.insert(s);
            }
        }
    }
    Ok(ShiftGrid {
        kind,
        shifts: set.into_iter().collect(),
    })
}

fn check_bound(bound: u32) -> Result<()> {
    if bound == 0 {
        return Err(Error::domain("grid bound must be at least 1"));
    }
    Ok(())
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One layer's diff value inside an equivariance report.
#[derive(Debug, Clone, Serialize)]
pub struct LayerDiffEntry {
    pub layer: String,
    pub cumulative_stride: usize,
    pub diff: f64,
}

/// Per-layer equivariance measurement for one input and one shift.
#[derive(Debug, Clone, Serialize)]
pub struct EquivarianceReport {
    pub shift: String,
    pub samples: usize,
    pub entries: Vec<LayerDiffEntry>,
}

/// Measures the equivariance diff of every tap for one input.
///
/// Both the reference and the shifted branch are propagated with taps; each
/// tap pair is upsampled back to input resolution (factor = cumulative
/// stride), the reference tap is shifted by the full input-resolution `Δ`,
/// and [`layer_diff`] is taken.
pub fn equivariance_report(
    net: &Network,
    x: &Tensor3,
    shift: &RationalShift,
) -> Result<EquivarianceReport> {
    let shifted = spectral::fractional_shift_2d(x, shift)?;
    let (_, taps_ref) = net.forward(x, true)?;
    let (_, taps_shift) = net.forward(&shifted, true)?;
    let mut entries = Vec::with_capacity(taps_ref.len());
    for (t0, t1) in taps_ref.iter().zip(&taps_shift) {
        debug_assert_eq!(t0.name, t1.name);
        let up0 = upsample_to_input(&t0.output, t0.cumulative_stride)?;
        let up1 = upsample_to_input(&t1.output, t1.cumulative_stride)?;
        let reference = spectral::fractional_shift_2d(&up0, shift)?;
        entries.push(LayerDiffEntry {
            layer: t0.name.clone(),
            cumulative_stride: t0.cumulative_stride,
            diff: layer_diff(&reference, &up1, DIFF_EPS)?,
        });
    }
    Ok(EquivarianceReport {
        shift: shift.to_string(),
        samples: 1,
        entries,
    })
}

fn upsample_to_input(t: &Tensor3, stride: usize) -> Result<Tensor3> {
    if stride <= 1 {
        Ok(t.clone())
    } else {
        spectral::upsample_2d(t, stride)
    }
}

/// Index of the largest logit; ties break to the lowest class index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &val) in v.iter().enumerate().skip(1) {
        if val > v[best] {
            best = i;
        }
    }
    best
}

/// How the per-sample shift of a consistency run is chosen.
#[derive(Debug, Clone)]
pub enum ShiftChoice<'a> {
    /// The same shift for every sample.
    Fixed(RationalShift),
    /// One seeded draw from the grid per sample.
    RandomFrom { grid: &'a ShiftGrid, seed: u64 },
}

/// Outcome of a consistency measurement.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyOutcome {
    /// Fraction of samples whose argmax is unchanged by their shift.
    pub fraction: f64,
    /// Largest absolute logit deviation observed across samples.
    pub max_logit_dev: f64,
    /// The shift applied to each sample.
    pub shifts: Vec<String>,
}

/// Fraction of inputs whose predicted class is identical before and after
/// shifting. Ties break to the lowest class index on both sides.
pub fn consistency(
    net: &Network,
    inputs: &[Tensor3],
    choice: ShiftChoice<'_>,
) -> Result<ConsistencyOutcome> {
    if inputs.is_empty() {
        return Err(Error::domain("consistency requires at least one input"));
    }
    let shifts: Vec<RationalShift> = match choice {
        ShiftChoice::Fixed(s) => vec![s; inputs.len()],
        ShiftChoice::RandomFrom { grid, seed } => {
            if grid.shifts.is_empty() {
                return Err(Error::domain("cannot sample from an empty grid"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..inputs.len())
                .map(|_| grid.shifts[rng.gen_range(0..grid.shifts.len())])
                .collect()
        }
    };
    let mut unchanged = 0usize;
    let mut max_dev: f64 = 0.0;
    for (x, shift) in inputs.iter().zip(&shifts) {
        let clean = net.logits(x)?;
        let moved = net.logits(&spectral::fractional_shift_2d(x, shift)?)?;
        if argmax(&clean) == argmax(&moved) {
            unchanged += 1;
        }
        for (a, b) in clean.iter().zip(&moved) {
            max_dev = max_dev.max((a - b).abs());
        }
    }
    Ok(ConsistencyOutcome {
        fraction: unchanged as f64 / inputs.len() as f64,
        max_logit_dev: max_dev,
        shifts: shifts.iter().map(|s| s.to_string()).collect(),
    })
}

/// Fraction of samples classified as `label` for the unshifted input and for
/// every shift in the grid.
pub fn adversarial_accuracy(
    net: &Network,
    inputs: &[Tensor3],
    labels: &[usize],
    grid: &ShiftGrid,
) -> Result<f64> {
    if inputs.len() != labels.len() {
        return Err(Error::shape(format!(
            "{} inputs but {} labels",
            inputs.len(),
            labels.len()
        )));
    }
    if inputs.is_empty() {
        return Err(Error::domain("adversarial accuracy requires inputs"));
    }
    let mut robust = 0usize;
    'samples: for (x, &label) in inputs.iter().zip(labels) {
        if argmax(&net.logits(x)?) != label {
            continue;
        }
        for shift in &grid.shifts {
            let moved = spectral::fractional_shift_2d(x, shift)?;
            if argmax(&net.logits(&moved)?) != label {
                continue 'samples;
            }
        }
        robust += 1;
    }
    Ok(robust as f64 / inputs.len() as f64)
}

/// Fraction of unshifted samples classified as their label.
pub fn clean_accuracy(net: &Network, inputs: &[Tensor3], labels: &[usize]) -> Result<f64> {
    if inputs.len() != labels.len() || inputs.is_empty() {
        return Err(Error::shape("need equally many inputs and labels".to_string()));
    }
    let mut correct = 0usize;
    for (x, &label) in inputs.iter().zip(labels) {
        if argmax(&net.logits(x)?) == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / inputs.len() as f64)
}

/// Seeded Gaussian images passed through the cutoff-1 sanitizer that zeroes
/// even-size Nyquist bins, so the band-limitedness premise of fractional
/// shifts holds for every harness input.
pub fn random_sanitized_inputs(
    seed: u64,
    count: usize,
    channels: usize,
    height: usize,
    width: usize,
) -> Vec<Tensor3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let data: Vec<f64> = (0..channels * height * width)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let t = Tensor3::new(channels, height, width, data).expect("finite gaussian data");
            spectral::nyquist_sanitize_2d(&t)
        })
        .collect()
}
