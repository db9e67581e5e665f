//! Slow, independent reference implementations used to validate the fast
//! spectral and layer paths.
//!
//! Nothing in this module touches the FFT backend or the mask constructors in
//! [`crate::spectral`]: the DFTs are direct `O(N^2)` summations and the
//! band-limited interpolant is the closed-form Dirichlet kernel. These run
//! only in tests and the `verify` CLI command; performance is a non-goal.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Direct-summation DFT, `X[k] = sum_n x[n] e^{-j 2π k n / N}`.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let tw = twiddles(n, -1.0);
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                acc += v * tw[(k * i) % n];
            }
            acc
        })
        .collect()
}

/// Direct-summation inverse DFT with the `1/N` normalization.
pub fn naive_idft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let tw = twiddles(n, 1.0);
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                acc += v * tw[(k * i) % n];
            }
            acc * scale
        })
        .collect()
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / n as f64))
        .collect()
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Full 2-D DFT by direct double summation over both axes (row-major `h x w`).
pub fn naive_dft_2d(data: &[f64], h: usize, w: usize) -> Vec<Complex64> {
    assert_eq!(data.len(), h * w);
    let mut out = vec![Complex64::new(0.0, 0.0); h * w];
    for ky in 0..h {
        for kx in 0..w {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..h {
                for j in 0..w {
                    let phase = -2.0 * PI * (ky * i) as f64 / h as f64
                        - 2.0 * PI * (kx * j) as f64 / w as f64;
                    acc += data[i * w + j] * Complex64::from_polar(1.0, phase);
                }
            }
            out[ky * w + kx] = acc;
        }
    }
    out
}

/// Inverse of [`naive_dft_2d`], returning the real part.
pub fn naive_idft_2d(spec: &[Complex64], h: usize, w: usize) -> Vec<f64> {
    assert_eq!(spec.len(), h * w);
    let scale = 1.0 / (h * w) as f64;
    let mut out = vec![0.0; h * w];
    for i in 0..h {
        for j in 0..w {
            let mut acc = Complex64::new(0.0, 0.0);
            for ky in 0..h {
                for kx in 0..w {
                    let phase = 2.0 * PI * (ky * i) as f64 / h as f64
                        + 2.0 * PI * (kx * j) as f64 / w as f64;
                    acc += spec[ky * w + kx] * Complex64::from_polar(1.0, phase);
                }
            }
            out[i * w + j] = acc.re * scale;
        }
    }
    out
}

/// Evaluates the unique trigonometric interpolant of a periodic discrete
/// signal at continuous position `t` (in sample units).
///
/// The kernel is the periodized sinc (Dirichlet kernel); for even lengths the
/// Nyquist bin is interpreted as a pure cosine, matching the half-gain
/// treatment of the exact upsampling masks. `sinc_reconstruct(x, n) == x[n]`.
pub fn sinc_reconstruct(x: &[f64], t: f64) -> f64 {
    let n = x.len();
    if n == 1 {
        return x[0];
    }
    let nf = n as f64;
    let tt = t.rem_euclid(nf);
    let mut acc = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let u = tt - i as f64;
        let k = if u == 0.0 {
            1.0
        } else if n % 2 == 1 {
            (PI * u).sin() / (nf * (PI * u / nf).sin())
        } else {
            (PI * u).sin() / (nf * (PI * u / nf).tan())
        };
        acc += v * k;
    }
    acc
}

/// Reference fractional shift: `out[k] = z(k - Δ)` where `z` is the
/// band-limited interpolant of `x`. Positive `Δ` moves content toward higher
/// indices, matching the roll orientation of the fast path.
pub fn oracle_shift(x: &[f64], delta: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| sinc_reconstruct(x, k as f64 - delta))
        .collect()
}

/// Dense sampling of the interpolant on a grid `factor` times finer.
pub fn sinc_upsample(x: &[f64], factor: usize) -> Vec<f64> {
    let n = x.len();
    (0..n * factor)
        .map(|m| sinc_reconstruct(x, m as f64 / factor as f64))
        .collect()
}

/// Band-limits a dense row to the coarse grid's spectrum and resamples it to
/// `len / factor` points: ideal LPF keeping only the original band (bins
/// strictly below `N/2` and their mirrors), then every `factor`-th sample.
/// Built on the naive DFT so it stays independent of the fast path.
fn band_limited_decimate(dense: &[f64], factor: usize) -> Vec<f64> {
    let m = dense.len();
    let n = m / factor;
    debug_assert_eq!(n * factor, m);
    let spec = naive_dft(&to_complex(dense));
    let scale = 1.0 / m as f64;
    (0..n)
        .map(|out_idx| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &s) in spec.iter().enumerate() {
                let passes = 2 * k < n || 2 * (m - k) < n;
                if passes {
                    let phase = 2.0 * PI * (k * out_idx * factor) as f64 / m as f64;
                    acc += s * Complex64::from_polar(1.0, phase);
                }
            }
            acc.re * scale
        })
        .collect()
}

/// Degree-2 polynomial with the global activation scale applied outside and
/// inside: `c * (a0 + a1*(c*x) + a2*(c*x)^2)`.
pub fn scaled_poly2(v: f64, coeffs: [f64; 3], scale: f64) -> f64 {
    let u = scale * v;
    scale * (coeffs[0] + coeffs[1] * u + coeffs[2] * u * u)
}

/// Continuous-domain simulation of the alias-free polynomial activation on a
/// 1-D signal: oversample by `factor`, apply the polynomial pointwise, ideal
/// LPF back to the original band, resample to `n` points.
///
/// `factor` must satisfy `factor >= d + 1` (degree `d = 2`) so the dense grid
/// can represent the polynomial's full bandwidth without truncation.
pub fn oracle_alias_free_poly_1d(
    x: &[f64],
    coeffs: [f64; 3],
    scale: f64,
    factor: usize,
) -> Result<Vec<f64>> {
    check_oracle_factor(factor)?;
    let dense: Vec<f64> = sinc_upsample(x, factor)
        .into_iter()
        .map(|v| scaled_poly2(v, coeffs, scale))
        .collect();
    Ok(band_limited_decimate(&dense, factor))
}

/// 2-D continuous-domain simulation of the alias-free polynomial activation,
/// per channel: separable dense oversampling, pointwise polynomial on the
/// dense grid, separable band-limited decimation back to the input size.
pub fn oracle_alias_free_poly_2d(
    t: &Tensor3,
    coeffs: &[[f64; 3]],
    scale: f64,
    factor: usize,
) -> Result<Tensor3> {
    check_oracle_factor(factor)?;
    let (c, h, w) = t.shape();
    if coeffs.len() != c {
        return Err(Error::shape(format!(
            "expected {c} coefficient triples, got {}",
            coeffs.len()
        )));
    }
    let mut out = Tensor3::zeros(c, h, w);
    #[allow(clippy::needless_range_loop)]
    for ch in 0..c {
        // Dense grid (h*factor x w*factor): rows, then columns.
        let mut rows_dense = vec![0.0; h * w * factor];
        for i in 0..h {
            let dense = sinc_upsample(t.row(ch, i), factor);
            rows_dense[i * w * factor..(i + 1) * w * factor].copy_from_slice(&dense);
        }
        let wf = w * factor;
        let hf = h * factor;
        let mut dense = vec![0.0; hf * wf];
        let mut col = vec![0.0; h];
        for j in 0..wf {
            for (i, v) in col.iter_mut().enumerate() {
                *v = rows_dense[i * wf + j];
            }
            for (i, v) in sinc_upsample(&col, factor).into_iter().enumerate() {
                dense[i * wf + j] = v;
            }
        }
        for v in dense.iter_mut() {
            *v = scaled_poly2(*v, coeffs[ch], scale);
        }
        // Band-limit and resample, axis by axis.
        let mut rows_coarse = vec![0.0; hf * w];
        for i in 0..hf {
            let row = &dense[i * wf..(i + 1) * wf];
            rows_coarse[i * w..(i + 1) * w].copy_from_slice(&band_limited_decimate(row, factor));
        }
        let mut colf = vec![0.0; hf];
        for j in 0..w {
            for (i, v) in colf.iter_mut().enumerate() {
                *v = rows_coarse[i * w + j];
            }
            for (i, v) in band_limited_decimate(&colf, factor).into_iter().enumerate() {
                out.set(ch, i, j, v);
            }
        }
    }
    Ok(out)
}

fn check_oracle_factor(factor: usize) -> Result<()> {
    // Degree 2 expands the band by 2x, so any factor >= 3 avoids truncation
    // on the dense grid.
    if factor < 3 {
        return Err(Error::config(format!(
            "oversampling factor {factor} cannot represent a squared band, need >= 3"
        )));
    }
    Ok(())
}

/// Default dense-grid oversampling factor for the continuous-domain oracle.
pub const DEFAULT_ORACLE_FACTOR: usize = 16;
