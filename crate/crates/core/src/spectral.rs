//! Exact DFT-domain resampling primitives for periodic signals.
//!
//! All operations treat a length-`N` vector as one period of a band-limited
//! periodic signal. Filtering and resampling are realized as multiplication
//! with real per-bin masks in the DFT domain, which makes them exact (up to
//! floating-point rounding) rather than approximate:
//!
//! - [`ideal_lpf_1d`] — brick-wall low-pass via [`lowpass_mask`],
//! - [`upsample_1d`] — zero-stuffing followed by the reconstruction mask
//!   ([`upsample_mask`]) and a gain of the upsample factor,
//! - [`downsample_1d`] — low-pass at `1/s` followed by fixed-grid subsampling,
//! - [`fractional_shift_1d`] — upsample, integer roll, downsample.
//!
//! The 2-D variants apply the 1-D operation separably on rows and columns of
//! each channel.
//!
//! DFT convention: unnormalized forward transform, `1/N` on the inverse.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Greatest common divisor (non-negative operands).
fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A rational cutoff ratio in `(0, 1]`, kept exact so that mask boundary
/// comparisons never suffer from floating-point rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoff {
    num: u64,
    den: u64,
}

impl Cutoff {
    /// Builds `num/den`, reduced. Errors unless `0 < num/den <= 1`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("cutoff denominator must be positive"));
        }
        if num == 0 || num > den {
            return Err(Error::domain(format!(
                "cutoff must lie in (0, 1], got {num}/{den}"
            )));
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    /// Cutoff 1 (passes everything except an even-length Nyquist bin).
    pub fn full() -> Self {
        Self { num: 1, den: 1 }
    }

    /// Cutoff `1/s`, the anti-aliasing cutoff for subsampling by `s`.
    pub fn for_stride(s: usize) -> Result<Self> {
        Self::new(1, s as u64)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Whether DFT bin `k` of a length-`n` signal passes the filter.
    ///
    /// Pass iff `k < N*c/2` or `k > N - N*c/2`, evaluated in integer
    /// arithmetic: bins exactly on the boundary are zeroed.
    fn passes(&self, k: usize, n: usize) -> bool {
        let (k, n) = (k as u64, n as u64);
        // k < n*c/2  <=>  2*den*k < n*num
        let low = 2 * self.den * k < n * self.num;
        // k > n - n*c/2  <=>  2*den*(n - k) < n*num
        let high = 2 * self.den * (n - k) < n * self.num;
        low || high
    }
}

impl std::str::FromStr for Cutoff {
    type Err = Error;

    /// Parses `"num/den"` or a bare integer (e.g. `"1"`).
    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<u64>().map_err(|_| bad_cutoff(s))?,
                b.trim().parse::<u64>().map_err(|_| bad_cutoff(s))?,
            ),
            None => (s.trim().parse::<u64>().map_err(|_| bad_cutoff(s))?, 1),
        };
        Cutoff::new(num, den)
    }
}

fn bad_cutoff(s: &str) -> Error {
    Error::domain(format!("cannot parse cutoff ratio from {s:?}"))
}

/// A real per-frequency-bin multiplier implementing an ideal LPF or an
/// upsample reconstruction kernel.
///
/// Gains are always in `{0, 1/2, 1}` and placed conjugate-symmetrically
/// (`gains[k] == gains[M - k mod M]`), which guarantees real output for real
/// input.
#[derive(Debug, Clone, PartialEq)]
pub struct DftMask {
    gains: Vec<f64>,
}

impl DftMask {
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Multiplies a spectrum elementwise by the mask gains.
    pub fn apply(&self, spectrum: &mut [Complex64]) {
        debug_assert_eq!(spectrum.len(), self.gains.len());
        for (v, g) in spectrum.iter_mut().zip(&self.gains) {
            *v *= g;
        }
    }

    /// Test-support constructor for deliberately malformed masks. Not used by
    /// any production path.
    pub fn from_gains_unchecked(gains: Vec<f64>) -> Self {
        Self { gains }
    }
}

/// Ideal low-pass mask of length `n`: pass below `n*c/2`, zero the closed band
/// `[n*c/2, n - n*c/2]`, pass above.
///
/// When `n*c/2` is an integer the boundary bins are zeroed; in particular
/// cutoff 1 on an even length zeroes exactly the Nyquist bin.
pub fn lowpass_mask(n: usize, cutoff: Cutoff) -> DftMask {
    assert!(n >= 1, "mask length must be positive");
    let gains = (0..n)
        .map(|k| if cutoff.passes(k, n) { 1.0 } else { 0.0 })
        .collect();
    DftMask { gains }
}

/// Reconstruction mask of length `n * factor` used after zero-stuffing a
/// length-`n` signal by `factor`.
///
/// Passes the `n` original-band bins and zeroes the rest. For even `n` the
/// Nyquist content sits folded in bins `n/2` and `n*(factor - 1/2)`; both get
/// gain 1/2 so their sum reconstructs the cosine component (this assumes that
/// component is real, which holds for real input signals).
pub fn upsample_mask(n: usize, factor: usize) -> Result<DftMask> {
    if factor < 2 {
        return Err(Error::domain(format!(
            "upsample factor must be at least 2, got {factor}"
        )));
    }
    let m = n * factor;
    let mut gains = vec![0.0; m];
    if n.is_multiple_of(2) {
        let lo = n / 2;
        let hi = n * (2 * factor - 1) / 2; // n*(factor - 1/2)
        for (k, g) in gains.iter_mut().enumerate() {
            if k < lo || k > hi {
                *g = 1.0;
            } else if k == lo || k == hi {
                *g = 0.5;
            }
        }
    } else {
        // Odd n has no Nyquist bin: pass bins 0..=floor(n/2) and the mirrored
        // upper band ceil(n*(factor - 1/2))..m-1, exactly n bins in total.
        let lo = n / 2;
        let hi = (n * (2 * factor - 1)).div_ceil(2); // ceil(n*(factor - 1/2))
        for (k, g) in gains.iter_mut().enumerate() {
            if k <= lo || k >= hi {
                *g = 1.0;
            }
        }
    }
    Ok(DftMask { gains })
}

fn fft_forward(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

fn fft_inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward DFT of a real signal (unnormalized).
pub(crate) fn dft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

/// Inverse DFT, discarding the (numerically negligible) imaginary residue.
pub(crate) fn idft_to_real(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    fft_inverse(&mut spectrum);
    spectrum.into_iter().map(|v| v.re).collect()
}

/// Applies `mask` to `x` in the DFT domain and returns the real result.
pub(crate) fn apply_mask_1d(x: &[f64], mask: &DftMask) -> Vec<f64> {
    let mut spectrum = dft_real(x);
    mask.apply(&mut spectrum);
    idft_to_real(spectrum)
}

/// Ideal low-pass filter: zero every DFT bin at or above the cutoff band
/// edge. Length-preserving, linear, idempotent.
pub fn ideal_lpf_1d(x: &[f64], cutoff: Cutoff) -> Vec<f64> {
    apply_mask_1d(x, &lowpass_mask(x.len(), cutoff))
}

/// Exact band-limited upsampling by an integer `factor >= 2`.
///
/// Zero-stuffs `x`, applies [`upsample_mask`], and multiplies by `factor`:
/// zero-stuffing divides every spectral replica by the factor, so the gain is
/// what keeps `out[n*factor] == x[n]` on the original grid.
pub fn upsample_1d(x: &[f64], factor: usize) -> Result<Vec<f64>> {
    let n = x.len();
    let mask = upsample_mask(n, factor)?;
    let mut stuffed = vec![0.0; n * factor];
    for (i, &v) in x.iter().enumerate() {
        stuffed[i * factor] = v;
    }
    let mut spectrum = dft_real(&stuffed);
    mask.apply(&mut spectrum);
    let gain = factor as f64;
    for v in spectrum.iter_mut() {
        *v *= gain;
    }
    Ok(idft_to_real(spectrum))
}

/// Alias-free decimation: ideal LPF at cutoff `1/s`, then every `s`-th sample.
///
/// The LPF zeroes the band edge itself, so content at exactly the target
/// Nyquist frequency is removed (a one-time band-limitation; after that,
/// upsample/downsample round trips are exact).
pub fn downsample_1d(x: &[f64], s: usize) -> Result<Vec<f64>> {
    if s < 2 {
        return Err(Error::domain(format!(
            "downsample factor must be at least 2, got {s}"
        )));
    }
    if !x.len().is_multiple_of(s) {
        return Err(Error::shape(format!(
            "signal length {} is not divisible by stride {s}",
            x.len()
        )));
    }
    let filtered = ideal_lpf_1d(x, Cutoff::for_stride(s)?);
    Ok(filtered.into_iter().step_by(s).collect())
}

/// Circular roll moving content toward higher indices for positive `m`:
/// `out[(i + m) mod N] = x[i]`.
pub fn roll(x: &[f64], m: i64) -> Vec<f64> {
    let n = x.len();
    let shift = (m.rem_euclid(n as i64)) as usize;
    let mut out = vec![0.0; n];
    for (i, &v) in x.iter().enumerate() {
        out[(i + shift) % n] = v;
    }
    out
}

/// Fractional circular shift by `m/n` samples toward higher indices.
///
/// `n == 1` is an exact integer roll; otherwise the shift is realized as
/// upsample by `n`, roll by `m`, downsample by `n`. On signals whose Nyquist
/// bin is zero this matches the band-limited interpolant exactly and is
/// norm-preserving.
pub fn fractional_shift_1d(x: &[f64], m: i64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("shift denominator must be positive"));
    }
    if n == 1 {
        return Ok(roll(x, m));
    }
    let up = upsample_1d(x, n)?;
    downsample_1d(&roll(&up, m), n)
}

/// Zeroes the Nyquist bin of an even-length signal (cutoff-1 LPF); identity
/// for odd lengths. This discharges the band-limitedness premise fractional
/// shifts rely on.
pub fn nyquist_sanitize_1d(x: &[f64]) -> Vec<f64> {
    ideal_lpf_1d(x, Cutoff::full())
}

/// A 2-D translation in pixels stored as exact integer ratios
/// `(dy, dx) = (m1/n1, m2/n2)`, each reduced to lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalShift {
    dy_num: i64,
    dy_den: u64,
    dx_num: i64,
    dx_den: u64,
}

impl RationalShift {
    /// Builds `(m1/n1, m2/n2)`, reduced. Denominators must be positive.
    pub fn new(m1: i64, n1: u64, m2: i64, n2: u64) -> Result<Self> {
        let (dy_num, dy_den) = Self::reduce(m1, n1)?;
        let (dx_num, dx_den) = Self::reduce(m2, n2)?;
        Ok(Self { dy_num, dy_den, dx_num, dx_den })
    }

    /// The zero shift.
    pub fn zero() -> Self {
        Self { dy_num: 0, dy_den: 1, dx_num: 0, dx_den: 1 }
    }

    fn reduce(m: i64, n: u64) -> Result<(i64, u64)> {
        if n == 0 {
            return Err(Error::domain("shift denominator must be positive"));
        }
        if m == 0 {
            return Ok((0, 1));
        }
        let g = gcd(m.unsigned_abs(), n);
        Ok((m / g as i64, n / g))
    }

    /// Row (height-axis) shift as `(numerator, denominator)`.
    pub fn dy(&self) -> (i64, u64) {
        (self.dy_num, self.dy_den)
    }

    /// Column (width-axis) shift as `(numerator, denominator)`.
    pub fn dx(&self) -> (i64, u64) {
        (self.dx_num, self.dx_den)
    }

    pub fn dy_value(&self) -> f64 {
        self.dy_num as f64 / self.dy_den as f64
    }

    pub fn dx_value(&self) -> f64 {
        self.dx_num as f64 / self.dx_den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.dy_num == 0 && self.dx_num == 0
    }

    /// The shift this one becomes after downsampling both axes by `s`
    /// (an equivariant layer with stride `s` maps a shift by `Δ` at its input
    /// to a shift by `Δ/s` at its output).
    pub fn divided_by(&self, s: u64) -> Result<Self> {
        Self::new(
            self.dy_num,
            self.dy_den * s,
            self.dx_num,
            self.dx_den * s,
        )
    }
}

impl std::fmt::Display for RationalShift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}/{},{}/{}",
            self.dy_num, self.dy_den, self.dx_num, self.dx_den
        )
    }
}

impl std::str::FromStr for RationalShift {
    type Err = Error;

    /// Parses `"m1/n1,m2/n2"`; bare integers are accepted per component.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain(format!("cannot parse shift from {s:?}, expected m1/n1,m2/n2"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let parse = |part: &str| -> Result<(i64, u64)> {
            match part.split_once('/') {
                Some((m, n)) => Ok((
                    m.trim().parse().map_err(|_| bad())?,
                    n.trim().parse().map_err(|_| bad())?,
                )),
                None => Ok((part.trim().parse().map_err(|_| bad())?, 1)),
            }
        };
        let (m1, n1) = parse(a)?;
        let (m2, n2) = parse(b)?;
        Self::new(m1, n1, m2, n2)
    }
}

/// Applies a length-preserving or uniformly length-scaling 1-D operation to
/// every row of every channel, then to every column of the result.
pub fn apply_separable_2d<F>(t: &Tensor3, op: F) -> Result<Tensor3>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let (c, h, w) = t.shape();
    // Rows first.
    let mut new_w = None;
    let mut rows_out: Vec<f64> = Vec::new();
    for ch in 0..c {
        for i in 0..h {
            let out = op(t.row(ch, i))?;
            match new_w {
                None => new_w = Some(out.len()),
                Some(len) if len == out.len() => {}
                Some(len) => {
                    return Err(Error::shape(format!(
                        "row operation returned inconsistent lengths {len} and {}",
                        out.len()
                    )))
                }
            }
            rows_out.extend_from_slice(&out);
        }
    }
    let w2 = new_w.unwrap_or(w);
    // Columns of the intermediate (c, h, w2) array.
    let mut col = vec![0.0; h];
    let mut new_h = None;
    let mut cols_out: Vec<Vec<f64>> = Vec::with_capacity(c * w2);
    for ch in 0..c {
        for j in 0..w2 {
            for (i, v) in col.iter_mut().enumerate() {
                *v = rows_out[(ch * h + i) * w2 + j];
            }
            let out = op(&col)?;
            match new_h {
                None => new_h = Some(out.len()),
                Some(len) if len == out.len() => {}
                Some(len) => {
                    return Err(Error::shape(format!(
                        "column operation returned inconsistent lengths {len} and {}",
                        out.len()
                    )))
                }
            }
            cols_out.push(out);
        }
    }
    let h2 = new_h.unwrap_or(h);
    let mut data = vec![0.0; c * h2 * w2];
    for ch in 0..c {
        for j in 0..w2 {
            let colv = &cols_out[ch * w2 + j];
            for i in 0..h2 {
                data[(ch * h2 + i) * w2 + j] = colv[i];
            }
        }
    }
    Tensor3::new(c, h2, w2, data)
}

/// Separable 2-D ideal low-pass filter at the given cutoff.
pub fn ideal_lpf_2d(t: &Tensor3, cutoff: Cutoff) -> Result<Tensor3> {
    apply_separable_2d(t, |row| Ok(ideal_lpf_1d(row, cutoff)))
}

/// Separable 2-D band-limited upsampling by `factor` per axis.
pub fn upsample_2d(t: &Tensor3, factor: usize) -> Result<Tensor3> {
    apply_separable_2d(t, |row| upsample_1d(row, factor))
}

/// Separable 2-D alias-free decimation by `s` per axis.
pub fn downsample_2d(t: &Tensor3, s: usize) -> Result<Tensor3> {
    apply_separable_2d(t, |row| downsample_1d(row, s))
}

/// Fractional circular shift of every channel: rows by `dx`, columns by `dy`.
/// The two axis shifts commute, so the application order is irrelevant.
pub fn fractional_shift_2d(t: &Tensor3, shift: &RationalShift) -> Result<Tensor3> {
    let (m1, n1) = shift.dy();
    let (m2, n2) = shift.dx();
    let rows = apply_separable_row_only(t, |row| fractional_shift_1d(row, m2, n2 as usize))?;
    apply_separable_col_only(&rows, |col| fractional_shift_1d(col, m1, n1 as usize))
}

/// Zeroes the Nyquist row/column bins of every channel (cutoff-1 LPF on both
/// axes). Inputs fed to any shift-invariance harness go through this first.
pub fn nyquist_sanitize_2d(t: &Tensor3) -> Tensor3 {
    ideal_lpf_2d(t, Cutoff::full()).expect("cutoff-1 LPF is length-preserving")
}

fn apply_separable_row_only<F>(t: &Tensor3, op: F) -> Result<Tensor3>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let (c, h, _) = t.shape();
    let mut data = Vec::with_capacity(t.len());
    let mut new_w = None;
    for ch in 0..c {
        for i in 0..h {
            let out = op(t.row(ch, i))?;
            if let Some(len) = new_w {
                if len != out.len() {
                    return Err(Error::shape("inconsistent row lengths".to_string()));
                }
            } else {
                new_w = Some(out.len());
            }
            data.extend_from_slice(&out);
        }
    }
    Tensor3::new(c, h, new_w.unwrap_or(0), data)
}

fn apply_separable_col_only<F>(t: &Tensor3, op: F) -> Result<Tensor3>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let (c, h, w) = t.shape();
    let mut col = vec![0.0; h];
    let mut new_h = None;
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(c * w);
    for ch in 0..c {
        for j in 0..w {
            for (i, v) in col.iter_mut().enumerate() {
                *v = t.get(ch, i, j);
            }
            let out = op(&col)?;
            if let Some(len) = new_h {
                if len != out.len() {
                    return Err(Error::shape("inconsistent column lengths".to_string()));
                }
            } else {
                new_h = Some(out.len());
            }
            cols.push(out);
        }
    }
    let h2 = new_h.unwrap_or(h);
    let mut data = vec![0.0; c * h2 * w];
    for ch in 0..c {
        for j in 0..w {
            let colv = &cols[ch * w + j];
            for i in 0..h2 {
                data[(ch * h2 + i) * w + j] = colv[i];
            }
        }
    }
    Tensor3::new(c, h2, w, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!(
                (x - y).abs() < tol,
                "index {i}: {x} vs {y} (tol {tol})"
            );
        }
    }

    #[test]
    fn cutoff_rejects_out_of_range() {
        assert!(Cutoff::new(0, 1).is_err());
        assert!(Cutoff::new(3, 2).is_err());
        assert!(Cutoff::new(1, 0).is_err());
        assert!(Cutoff::new(2, 4).is_ok());
        assert_eq!(Cutoff::new(2, 4).unwrap(), Cutoff::new(1, 2).unwrap());
    }

    #[test]
    fn lowpass_mask_examples() {
        let m = lowpass_mask(8, Cutoff::new(1, 2).unwrap());
        assert_eq!(m.gains(), &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

        // Cutoff 1 on even length zeroes only the Nyquist bin.
        let m = lowpass_mask(4, Cutoff::full());
        assert_eq!(m.gains(), &[1.0, 1.0, 0.0, 1.0]);

        // Odd length, full band passes.
        let m = lowpass_mask(5, Cutoff::full());
        assert_eq!(m.gains(), &[1.0; 5]);
    }

    #[test]
    fn lowpass_mask_is_conjugate_symmetric() {
        for n in [2usize, 3, 4, 5, 8, 15, 16] {
            for c in [
                Cutoff::new(1, 3).unwrap(),
                Cutoff::new(1, 2).unwrap(),
                Cutoff::new(3, 4).unwrap(),
                Cutoff::full(),
            ] {
                let m = lowpass_mask(n, c);
                for k in 0..n {
                    assert_eq!(m.gains()[k], m.gains()[(n - k) % n], "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn lpf_passes_constants_and_kills_out_of_band_cosine() {
        let out = ideal_lpf_1d(&[5.0; 4], Cutoff::new(1, 2).unwrap());
        assert_close(&out, &[5.0; 4], 1e-12);

        let x: Vec<f64> = (0..8)
            .map(|n| (2.0 * std::f64::consts::PI * 3.0 * n as f64 / 8.0).cos())
            .collect();
        let out = ideal_lpf_1d(&x, Cutoff::new(1, 2).unwrap());
        assert_close(&out, &[0.0; 8], 1e-12);
    }

    #[test]
    fn upsample_mask_examples() {
        let m = upsample_mask(4, 2).unwrap();
        assert_eq!(m.gains(), &[1.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.5, 1.0]);

        // Boundary case: both half-gain bins and no full-gain upper band.
        let m = upsample_mask(2, 2).unwrap();
        assert_eq!(m.gains(), &[1.0, 0.5, 0.0, 0.5]);

        // Odd length: exactly n bins pass, conjugate-symmetrically. The upper
        // band starts at ceil(n*(factor - 1/2)).
        let m = upsample_mask(3, 2).unwrap();
        assert_eq!(m.gains(), &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);

        assert!(upsample_mask(4, 1).is_err());
    }

    #[test]
    fn upsample_mask_is_conjugate_symmetric_and_passes_n_bins() {
        for n in [1usize, 2, 3, 4, 5, 8, 15, 16] {
            for factor in [2usize, 3, 4] {
                let m = upsample_mask(n, factor).unwrap();
                let len = n * factor;
                let mut weight = 0.0;
                for k in 0..len {
                    assert_eq!(m.gains()[k], m.gains()[(len - k) % len], "n={n} I={factor} k={k}");
                    weight += m.gains()[k];
                }
                assert_eq!(weight, n as f64, "n={n} I={factor}");
            }
        }
    }

    #[test]
    fn upsample_preserves_constants_with_gain() {
        let out = upsample_1d(&[3.5; 6], 2).unwrap();
        assert_close(&out, &[3.5; 12], 1e-12);
    }

    #[test]
    fn upsample_interpolates_cosine_exactly() {
        let x: Vec<f64> = (0..8)
            .map(|n| (2.0 * std::f64::consts::PI * n as f64 / 8.0).cos())
            .collect();
        let want: Vec<f64> = (0..16)
            .map(|m| (2.0 * std::f64::consts::PI * m as f64 / 16.0).cos())
            .collect();
        let out = upsample_1d(&x, 2).unwrap();
        assert_close(&out, &want, 1e-9);
    }

    #[test]
    fn upsample_keeps_original_samples_on_the_coarse_grid() {
        let x = [0.3, -1.2, 0.7, 2.2, -0.4, 0.0, 1.1, -2.0];
        for factor in [2usize, 3, 4] {
            let out = upsample_1d(&x, factor).unwrap();
            for (n, &v) in x.iter().enumerate() {
                assert!((out[n * factor] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn downsample_examples() {
        let out = downsample_1d(&[2.5; 8], 2).unwrap();
        assert_close(&out, &[2.5; 4], 1e-12);

        // Frequency above the new Nyquist is removed entirely.
        let x: Vec<f64> = (0..8)
            .map(|n| (2.0 * std::f64::consts::PI * 3.0 * n as f64 / 8.0).cos())
            .collect();
        let out = downsample_1d(&x, 2).unwrap();
        assert_close(&out, &[0.0; 4], 1e-12);

        assert!(downsample_1d(&[1.0; 6], 4).is_err());
        assert!(downsample_1d(&[1.0; 6], 1).is_err());
    }

    #[test]
    fn round_trip_is_cutoff_one_lpf() {
        // down(up(x, s), s) equals the cutoff-1 LPF of x for arbitrary x
        // (identity except for an even-length Nyquist bin), and is exactly x
        // once x is Nyquist-clean.
        let x = [1.0, -2.0, 3.0, 0.5, -0.25, 4.0, -1.5, 2.0];
        for s in [2usize, 3, 4] {
            let rt = downsample_1d(&upsample_1d(&x, s).unwrap(), s).unwrap();
            assert_close(&rt, &nyquist_sanitize_1d(&x), 1e-10);
        }
        let clean = nyquist_sanitize_1d(&x);
        for s in [2usize, 3, 4] {
            let rt = downsample_1d(&upsample_1d(&clean, s).unwrap(), s).unwrap();
            assert_close(&rt, &clean, 1e-10);
        }
    }

    #[test]
    fn integer_shift_is_exact_roll() {
        let delta = [1.0, 0.0, 0.0, 0.0];
        let out = fractional_shift_1d(&delta, 1, 1).unwrap();
        assert_eq!(out, vec![0.0, 1.0, 0.0, 0.0]);

        let x = [0.3, 1.7, -2.0, 0.9];
        let out = fractional_shift_1d(&x, 0, 1).unwrap();
        assert_eq!(out, x.to_vec());

        assert_eq!(roll(&x, -1), vec![1.7, -2.0, 0.9, 0.3]);
        assert_eq!(roll(&x, 5), roll(&x, 1));
    }

    #[test]
    fn half_pixel_shift_of_delta_matches_dirichlet_samples() {
        // Shifting a delta by 1/2 lands the interpolant samples at t = k - 1/2.
        let mut delta = [0.0; 8];
        delta[0] = 1.0;
        let out = fractional_shift_1d(&delta, 1, 2).unwrap();
        let want: Vec<f64> = (0..8)
            .map(|k| crate::oracle::sinc_reconstruct(&delta, k as f64 - 0.5))
            .collect();
        assert_close(&out, &want, 1e-10);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn separable_lpf_matches_outer_product_factorization() {
        let u = [1.0, -0.5, 0.25, 2.0, 0.0, -1.0, 0.5, 1.5];
        let v = [0.2, 1.0, -0.7, 0.4, 2.0, -0.3, 0.8, -1.1];
        let c = Cutoff::new(1, 2).unwrap();

        let mut data = Vec::with_capacity(64);
        for &a in &u {
            for &b in &v {
                data.push(a * b);
            }
        }
        let t = Tensor3::new(1, 8, 8, data).unwrap();
        let filtered = ideal_lpf_2d(&t, c).unwrap();

        let fu = ideal_lpf_1d(&u, c);
        let fv = ideal_lpf_1d(&v, c);
        for i in 0..8 {
            for j in 0..8 {
                assert!((filtered.get(0, i, j) - fu[i] * fv[j]).abs() < 1e-10);
            }
        }

        // Constant image is untouched.
        let t = Tensor3::full(2, 4, 4, 3.0);
        let out = ideal_lpf_2d(&t, c).unwrap();
        assert!(t.max_abs_diff(&out) < 1e-12);
    }

    #[test]
    fn shift_2d_integer_case_rolls_both_axes() {
        let mut t = Tensor3::zeros(1, 4, 4);
        t.set(0, 0, 0, 1.0);
        let s = RationalShift::new(1, 1, 1, 1).unwrap();
        let out = fractional_shift_2d(&t, &s).unwrap();
        assert_eq!(out.get(0, 1, 1), 1.0);
        assert_eq!(out.get(0, 0, 0), 0.0);

        let out = fractional_shift_2d(&t, &RationalShift::zero()).unwrap();
        assert!(t.max_abs_diff(&out) < 1e-15);
    }

    #[test]
    fn shift_2d_half_pixel_round_trip_on_clean_input() {
        let data: Vec<f64> = (0..64).map(|i| ((i * 37 % 19) as f64) - 9.0).collect();
        let t = nyquist_sanitize_2d(&Tensor3::new(1, 8, 8, data).unwrap());
        let fwd = fractional_shift_2d(&t, &RationalShift::new(0, 1, 1, 2).unwrap()).unwrap();
        let back = fractional_shift_2d(&fwd, &RationalShift::new(0, 1, -1, 2).unwrap()).unwrap();
        assert!(t.max_abs_diff(&back) < 1e-10);
    }

    #[test]
    fn rational_shift_parsing_and_reduction() {
        let s: RationalShift = "1/2,3/4".parse().unwrap();
        assert_eq!(s.dy(), (1, 2));
        assert_eq!(s.dx(), (3, 4));

        let s: RationalShift = "2/4,-6/4".parse().unwrap();
        assert_eq!(s.dy(), (1, 2));
        assert_eq!(s.dx(), (-3, 2));

        let s: RationalShift = "1,0/1".parse().unwrap();
        assert_eq!(s.dy(), (1, 1));
        assert!(!s.is_zero());
        assert_eq!(s.dx(), (0, 1));

        assert!("1/0,1/1".parse::<RationalShift>().is_err());
        assert!("nonsense".parse::<RationalShift>().is_err());

        let d = s.divided_by(4).unwrap();
        assert_eq!(d.dy(), (1, 4));
    }
}
