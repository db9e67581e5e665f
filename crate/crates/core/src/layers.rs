//! Network layers: the alias-free set (circular convolution, BlurPool,
//! alias-free polynomial activation, LPF-Poly, alias-free LayerNorm) and the
//! aliasing baseline controls (GeLU, per-pixel LayerNorm, naked subsampling).
//!
//! Every alias-free layer commutes with fractional circular shifts of its
//! input (with the shift divided by the layer stride); the baseline controls
//! deliberately do not, which is what the metrics module measures.

use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::spectral::{self, Cutoff};
use crate::tensor::Tensor3;

/// Per-channel degree-2 polynomial activation `c * Poly2(c * x)` with
/// `Poly2(u) = a0 + a1*u + a2*u^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyActivation {
    coeffs: Vec<[f64; 3]>,
    scale: f64,
}

impl PolyActivation {
    /// One `(a0, a1, a2)` triple per channel; `scale` must be positive.
    pub fn new(coeffs: Vec<[f64; 3]>, scale: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::shape("need at least one coefficient triple"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("scale must be positive, got {scale}")));
        }
        if !coeffs.iter().all(|t| t.iter().all(|v| v.is_finite())) {
            return Err(Error::domain("polynomial coefficients must be finite"));
        }
        Ok(Self { coeffs, scale })
    }

    /// Same coefficient triple replicated across `channels`.
    pub fn uniform(channels: usize, coeffs: [f64; 3], scale: f64) -> Result<Self> {
        Self::new(vec![coeffs; channels], scale)
    }

    pub fn channels(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[[f64; 3]] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Degree of the polynomial (fixed).
    pub const DEGREE: usize = 2;

    /// Integer upsampling factor used by the alias-free wrapper. The exact
    /// requirement for degree d is (d+1)/2 = 1.5; the next integer factor
    /// gives strictly more headroom and keeps the resampling kernels exact.
    pub const UPSAMPLE_FACTOR: usize = 2;

    fn eval(&self, channel: usize, v: f64) -> f64 {
        let [a0, a1, a2] = self.coeffs[channel];
        let c = self.scale;
        let u = c * v;
        c * (a0 + a1 * u + a2 * u * u)
    }
}

/// Convolution weights shaped `(C_out, C_in/groups, k_h, k_w)` with one bias
/// per output channel. Striding is never part of the convolution itself; it
/// is delegated to [`blurpool`] (alias-free) or [`subsample`] (baseline).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvWeights {
    kernel: Vec<f64>,
    bias: Vec<f64>,
    c_out: usize,
    c_in_per_group: usize,
    k_h: usize,
    k_w: usize,
    groups: usize,
}

impl ConvWeights {
    pub fn new(
        kernel: Vec<f64>,
        bias: Vec<f64>,
        c_out: usize,
        c_in_per_group: usize,
        k_h: usize,
        k_w: usize,
        groups: usize,
    ) -> Result<Self> {
        if groups == 0 || !c_out.is_multiple_of(groups) {
            return Err(Error::shape(format!(
                "output channels {c_out} not divisible by groups {groups}"
            )));
        }
        if kernel.len() != c_out * c_in_per_group * k_h * k_w {
            return Err(Error::shape(format!(
                "kernel length {} does not match (out={c_out}, in/g={c_in_per_group}, {k_h}x{k_w})",
                kernel.len()
            )));
        }
        if bias.len() != c_out {
            return Err(Error::shape("bias length must equal output channels"));
        }
        if !kernel.iter().chain(bias.iter()).all(|v| v.is_finite()) {
            return Err(Error::domain("convolution weights must be finite"));
        }
        Ok(Self { kernel, bias, c_out, c_in_per_group, k_h, k_w, groups })
    }

    pub fn out_channels(&self) -> usize {
        self.c_out
    }

    pub fn in_channels(&self) -> usize {
        self.c_in_per_group * self.groups
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn kernel_shape(&self) -> (usize, usize, usize, usize) {
        (self.c_out, self.c_in_per_group, self.k_h, self.k_w)
    }

    pub fn parameter_count(&self) -> usize {
        self.kernel.len() + self.bias.len()
    }

    #[inline]
    fn weight(&self, co: usize, ci: usize, a: usize, b: usize) -> f64 {
        self.kernel[((co * self.c_in_per_group + ci) * self.k_h + a) * self.k_w + b]
    }
}

/// Cross-correlation with circular wrap-around indexing, stride 1.
///
/// Odd kernels are centered; even kernels anchor at the top-left tap. Output
/// spatial size equals input spatial size, bias is added after the sum.
/// Kernels wider than the map wrap around more than once, which keeps the
/// operation a plain periodic convolution at every size.
pub fn circular_conv2d(x: &Tensor3, w: &ConvWeights) -> Result<Tensor3> {
    let (c, h, wd) = x.shape();
    if c != w.in_channels() {
        return Err(Error::shape(format!(
            "input has {c} channels but kernel expects {}",
            w.in_channels()
        )));
    }
    let off_h = if w.k_h % 2 == 1 { (w.k_h - 1) / 2 } else { 0 } as i64;
    let off_w = if w.k_w % 2 == 1 { (w.k_w - 1) / 2 } else { 0 } as i64;
    // Per-tap wrapped indices, shared across all output positions.
    let idx_h: Vec<usize> = (0..w.k_h)
        .map(|a| (a as i64 - off_h).rem_euclid(h as i64) as usize)
        .collect();
    let idx_w: Vec<usize> = (0..w.k_w)
        .map(|b| (b as i64 - off_w).rem_euclid(wd as i64) as usize)
        .collect();
    let out_per_group = w.c_out / w.groups;
    let mut out = Tensor3::zeros(w.c_out, h, wd);
    for co in 0..w.c_out {
        let group = co / out_per_group;
        for i in 0..h {
            for j in 0..wd {
                let mut acc = 0.0;
                for ci in 0..w.c_in_per_group {
                    let src_c = group * w.c_in_per_group + ci;
                    for (a, &da) in idx_h.iter().enumerate() {
                        let ii = (i + da) % h;
                        for (b, &db) in idx_w.iter().enumerate() {
                            let jj = (j + db) % wd;
                            acc += w.weight(co, ci, a, b) * x.get(src_c, ii, jj);
                        }
                    }
                }
                out.set(co, i, j, acc + w.bias[co]);
            }
        }
    }
    Ok(out)
}

/// Fixed-grid subsampling starting at index 0 (no filtering). This is the
/// aliasing half of a strided convolution; baseline variants use it directly.
pub fn subsample(x: &Tensor3, s: usize) -> Result<Tensor3> {
    let (c, h, w) = x.shape();
    if s == 0 || h % s != 0 || w % s != 0 {
        return Err(Error::shape(format!(
            "spatial size {h}x{w} not divisible by stride {s}"
        )));
    }
    let (h2, w2) = (h / s, w / s);
    let mut out = Tensor3::zeros(c, h2, w2);
    for ch in 0..c {
        for i in 0..h2 {
            for j in 0..w2 {
                out.set(ch, i, j, x.get(ch, i * s, j * s));
            }
        }
    }
    Ok(out)
}

/// Alias-free downsampling: separable ideal LPF at cutoff `1/s`, then every
/// `s`-th row and column.
pub fn blurpool(x: &Tensor3, s: usize) -> Result<Tensor3> {
    if s < 2 {
        return Err(Error::domain(format!("blurpool stride must be >= 2, got {s}")));
    }
    let filtered = spectral::ideal_lpf_2d(x, Cutoff::for_stride(s)?)?;
    subsample(&filtered, s)
}

/// GeLU evaluated with the exact error-function form, `x * Phi(x)`.
pub fn gelu_scalar(v: f64) -> f64 {
    v * 0.5 * (1.0 + erf(v / std::f64::consts::SQRT_2))
}

/// Pointwise GeLU (baseline control; not alias-free).
pub fn gelu(x: &Tensor3) -> Tensor3 {
    x.map(gelu_scalar)
}

/// Number of grid points used by the GeLU least-squares fit.
pub const GELU_FIT_POINTS: usize = 1001;

/// Least-squares fit of `a0 + a1*x + a2*x^2` to GeLU over a uniform grid of
/// [`GELU_FIT_POINTS`] points on `[-sqrt(2), sqrt(2)]`. Deterministic.
pub fn fit_gelu_coeffs() -> [f64; 3] {
    fit_quadratic_on_gelu_range(gelu_scalar)
}

/// Quadratic least-squares fit of an arbitrary function on the GeLU fit grid.
pub fn fit_quadratic_on_gelu_range(f: impl Fn(f64) -> f64) -> [f64; 3] {
    let lo = -std::f64::consts::SQRT_2;
    let hi = std::f64::consts::SQRT_2;
    let n = GELU_FIT_POINTS;
    // Normal equations: moments S_k = sum x^k, rhs b_k = sum x^k f(x).
    let mut s = [0.0f64; 5];
    let mut b = [0.0f64; 3];
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let y = f(x);
        let mut p = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += p;
            if k < 3 {
                b[k] += p * y;
            }
            p *= x;
        }
    }
    solve3(
        [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]],
        b,
    )
}

/// 3x3 linear solve with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &bb| m[a][col].abs().total_cmp(&m[bb][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= m[row][k] * out[k];
        }
        out[row] = acc / m[row][row];
    }
    out
}

/// Pointwise scaled polynomial, per channel.
pub fn poly_eval(x: &Tensor3, p: &PolyActivation) -> Result<Tensor3> {
    check_activation_channels(x, p)?;
    let (c, h, w) = x.shape();
    let mut out = Tensor3::zeros(c, h, w);
    for ch in 0..c {
        for i in 0..h {
            for j in 0..w {
                out.set(ch, i, j, p.eval(ch, x.get(ch, i, j)));
            }
        }
    }
    Ok(out)
}

/// Gradient of `sum(upstream ⊙ poly_eval(x))` with respect to each channel's
/// coefficient triple: `(sum u*c, sum u*c^2*x, sum u*c^3*x^2)` over the
/// channel's pixels.
pub fn poly_coeff_gradient(
    x: &Tensor3,
    p: &PolyActivation,
    upstream: &Tensor3,
) -> Result<Vec<[f64; 3]>> {
    check_activation_channels(x, p)?;
    if x.shape() != upstream.shape() {
        return Err(Error::shape(format!(
            "upstream shape {:?} does not match input {:?}",
            upstream.shape(),
            x.shape()
        )));
    }
    let (c, h, w) = x.shape();
    let cs = p.scale();
    let mut grads = vec![[0.0; 3]; c];
    for (ch, g) in grads.iter_mut().enumerate().take(c) {
        for i in 0..h {
            for j in 0..w {
                let u = upstream.get(ch, i, j);
                let v = x.get(ch, i, j);
                g[0] += u * cs;
                g[1] += u * cs * cs * v;
                g[2] += u * cs * cs * cs * v * v;
            }
        }
    }
    Ok(grads)
}

/// Alias-free polynomial activation: upsample x2 per axis, apply the
/// polynomial pointwise, ideal LPF at cutoff 1/2, downsample x2. Spatial size
/// is preserved and the result matches the continuous-domain application of
/// the polynomial.
pub fn alias_free_poly(x: &Tensor3, p: &PolyActivation) -> Result<Tensor3> {
    check_activation_channels(x, p)?;
    let up = spectral::upsample_2d(x, PolyActivation::UPSAMPLE_FACTOR)?;
    let poly = poly_eval(&up, p)?;
    let filtered = spectral::ideal_lpf_2d(&poly, Cutoff::new(1, 2)?)?;
    spectral::downsample_2d(&filtered, PolyActivation::UPSAMPLE_FACTOR)
}

/// Default LPF cutoff of [`lpf_poly`]: the largest cutoff that stays
/// alias-free ahead of a stride-4 BlurPool.
pub fn lpf_poly_default_cutoff() -> Cutoff {
    Cutoff::new(3, 4).expect("3/4 is a valid cutoff")
}

/// Bandwidth-restrained quadratic used before the first BlurPool, without any
/// resampling: `c * (a0 + a1*(c*x) + a2*(c*x) ⊙ LPF(c*x))` per channel.
///
/// On its own this op is not alias-free; only the band below `π(1 - cutoff)`
/// is, which the following BlurPool isolates.
pub fn lpf_poly(x: &Tensor3, p: &PolyActivation, cutoff: Cutoff) -> Result<Tensor3> {
    check_activation_channels(x, p)?;
    if cutoff == Cutoff::full() {
        return Err(Error::domain("lpf-poly cutoff must be strictly below 1"));
    }
    let filtered = spectral::ideal_lpf_2d(x, cutoff)?;
    let (c, h, w) = x.shape();
    let cs = p.scale();
    let mut out = Tensor3::zeros(c, h, w);
    for ch in 0..c {
        let [a0, a1, a2] = p.coeffs()[ch];
        for i in 0..h {
            for j in 0..w {
                let u = cs * x.get(ch, i, j);
                let ul = cs * filtered.get(ch, i, j);
                out.set(ch, i, j, cs * (a0 + a1 * u + a2 * u * ul));
            }
        }
    }
    Ok(out)
}

/// Per-channel affine parameters of a normalization layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NormParams {
    gamma: Vec<f64>,
    beta: Vec<f64>,
    eps: f64,
}

/// Default epsilon inside the normalization square root.
pub const NORM_EPS: f64 = 1e-6;

impl NormParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>, eps: f64) -> Result<Self> {
        if gamma.len() != beta.len() {
            return Err(Error::shape("gamma and beta must have equal length"));
        }
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        Ok(Self { gamma, beta, eps })
    }

    /// Identity parameters (`gamma = 1`, `beta = 0`) for `channels`.
    pub fn identity(channels: usize) -> Self {
        Self {
            gamma: vec![1.0; channels],
            beta: vec![0.0; channels],
            eps: NORM_EPS,
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn parameter_count(&self) -> usize {
        self.gamma.len() + self.beta.len()
    }
}

fn check_norm_channels(x: &Tensor3, n: &NormParams) -> Result<()> {
    if x.channels() != n.channels() {
        return Err(Error::shape(format!(
            "input has {} channels but norm has {}",
            x.channels(),
            n.channels()
        )));
    }
    Ok(())
}

fn check_activation_channels(x: &Tensor3, p: &PolyActivation) -> Result<()> {
    if x.channels() != p.channels() {
        return Err(Error::shape(format!(
            "input has {} channels but activation has {}",
            x.channels(),
            p.channels()
        )));
    }
    Ok(())
}

/// Alias-free LayerNorm: center each pixel over channels (a fixed linear
/// channel mix, hence shift-equivariant), then scale every pixel by the one
/// standard deviation of the whole layer, `sqrt(mean(centered^2) + eps)`.
pub fn af_layernorm(x: &Tensor3, n: &NormParams) -> Result<Tensor3> {
    check_norm_channels(x, n)?;
    let (c, h, w) = x.shape();
    let mut centered = Tensor3::zeros(c, h, w);
    for i in 0..h {
        for j in 0..w {
            let mut mu = 0.0;
            for ch in 0..c {
                mu += x.get(ch, i, j);
            }
            mu /= c as f64;
            for ch in 0..c {
                centered.set(ch, i, j, x.get(ch, i, j) - mu);
            }
        }
    }
    let mean_sq = centered.data().iter().map(|v| v * v).sum::<f64>() / centered.len() as f64;
    let sigma = (mean_sq + n.eps).sqrt();
    let mut out = centered;
    for ch in 0..c {
        let (g, b) = (n.gamma[ch], n.beta[ch]);
        for i in 0..h {
            for j in 0..w {
                out.set(ch, i, j, g * out.get(ch, i, j) / sigma + b);
            }
        }
    }
    Ok(out)
}

/// Baseline LayerNorm: center and scale each pixel by its own mean and
/// standard deviation over channels. The per-pixel scaling is a pointwise
/// nonlinearity and breaks fractional-shift equivariance (the designated
/// negative control).
pub fn layernorm_pixelwise(x: &Tensor3, n: &NormParams) -> Result<Tensor3> {
    check_norm_channels(x, n)?;
    let (c, h, w) = x.shape();
    let mut out = Tensor3::zeros(c, h, w);
    for i in 0..h {
        for j in 0..w {
            let mut mu = 0.0;
            for ch in 0..c {
                mu += x.get(ch, i, j);
            }
            mu /= c as f64;
            let mut var = 0.0;
            for ch in 0..c {
                let d = x.get(ch, i, j) - mu;
                var += d * d;
            }
            var /= c as f64;
            let inv = 1.0 / (var + n.eps).sqrt();
            for ch in 0..c {
                let v = (x.get(ch, i, j) - mu) * inv;
                out.set(ch, i, j, n.gamma[ch] * v + n.beta[ch]);
            }
        }
    }
    Ok(out)
}

/// LayerNorm over a plain vector (used for the final norm on pooled
/// features, where per-pixel and per-layer scaling coincide).
pub fn vector_layernorm(v: &[f64], n: &NormParams) -> Result<Vec<f64>> {
    if v.len() != n.channels() {
        return Err(Error::shape(format!(
            "vector length {} does not match norm channels {}",
            v.len(),
            n.channels()
        )));
    }
    let mu = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / v.len() as f64;
    let inv = 1.0 / (var + n.eps).sqrt();
    Ok(v.iter()
        .enumerate()
        .map(|(i, x)| n.gamma[i] * (x - mu) * inv + n.beta[i])
        .collect())
}

/// Spatial mean per channel.
pub fn global_avg_pool(x: &Tensor3) -> Vec<f64> {
    let (c, h, w) = x.shape();
    let scale = 1.0 / (h * w) as f64;
    (0..c)
        .map(|ch| {
            let mut acc = 0.0;
            for i in 0..h {
                acc += x.row(ch, i).iter().sum::<f64>();
            }
            acc * scale
        })
        .collect()
}

/// Affine classification head.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearWeights {
    weight: Vec<f64>,
    bias: Vec<f64>,
    classes: usize,
    features: usize,
}

impl LinearWeights {
    pub fn new(weight: Vec<f64>, bias: Vec<f64>, classes: usize, features: usize) -> Result<Self> {
        if weight.len() != classes * features || bias.len() != classes {
            return Err(Error::shape("linear head weight/bias shape mismatch"));
        }
        Ok(Self { weight, bias, classes, features })
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn parameter_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }
}

/// `logits = W v + b`.
pub fn linear_head(v: &[f64], w: &LinearWeights) -> Result<Vec<f64>> {
    if v.len() != w.features {
        return Err(Error::shape(format!(
            "feature vector length {} does not match head ({})",
            v.len(),
            w.features
        )));
    }
    Ok((0..w.classes)
        .map(|k| {
            let row = &w.weight[k * w.features..(k + 1) * w.features];
            row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + w.bias[k]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{fractional_shift_2d, RationalShift};

    fn lcg_tensor(c: usize, h: usize, w: usize, seed: u64) -> Tensor3 {
        let mut s = seed;
        let data = (0..c * h * w)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            })
            .collect();
        Tensor3::new(c, h, w, data).unwrap()
    }

    #[test]
    fn one_by_one_kernel_is_identity() {
        let x = lcg_tensor(1, 4, 4, 1);
        let w = ConvWeights::new(vec![1.0], vec![0.0], 1, 1, 1, 1, 1).unwrap();
        let y = circular_conv2d(&x, &w).unwrap();
        assert!(x.max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn impulse_response_places_kernel_circularly() {
        let mut x = Tensor3::zeros(1, 5, 5);
        x.set(0, 0, 0, 1.0);
        let kernel: Vec<f64> = (1..=9).map(|v| v as f64).collect();
        let w = ConvWeights::new(kernel, vec![0.0], 1, 1, 3, 3, 1).unwrap();
        let y = circular_conv2d(&x, &w).unwrap();
        // Cross-correlation: out[i, j] = sum_{a,b} w[a, b] x[i+a-1, j+b-1];
        // a delta at the origin puts w[a, b] at position (1-a, 1-b) mod 5.
        assert_eq!(y.get(0, 0, 0), 5.0);
        assert_eq!(y.get(0, 1, 1), 1.0);
        assert_eq!(y.get(0, 4, 4), 9.0);
        assert_eq!(y.get(0, 0, 4), 6.0);
    }

    #[test]
    fn circular_conv_commutes_with_integer_rolls() {
        let x = lcg_tensor(2, 6, 6, 7);
        let w = ConvWeights::new(
            lcg_tensor(1, 1, 2 * 2 * 3 * 3, 3).data().to_vec(),
            vec![0.1, -0.2],
            2,
            2,
            3,
            3,
            1,
        )
        .unwrap();
        let shift = RationalShift::new(2, 1, 1, 1).unwrap();
        let a = circular_conv2d(&fractional_shift_2d(&x, &shift).unwrap(), &w).unwrap();
        let b = fractional_shift_2d(&circular_conv2d(&x, &w).unwrap(), &shift).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn grouped_conv_is_depthwise_when_groups_equal_channels() {
        let x = lcg_tensor(2, 4, 4, 9);
        // Depthwise identity: each channel convolved with a centered delta.
        let mut kernel = vec![0.0; 2 * 3 * 3];
        kernel[4] = 1.0;
        kernel[9 + 4] = 1.0;
        let w = ConvWeights::new(kernel, vec![0.0; 2], 2, 1, 3, 3, 2).unwrap();
        let y = circular_conv2d(&x, &w).unwrap();
        assert!(x.max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn conv_rejects_channel_mismatch() {
        let x = lcg_tensor(3, 4, 4, 11);
        let w = ConvWeights::new(vec![1.0; 4], vec![0.0; 4], 4, 1, 1, 1, 1).unwrap();
        assert!(matches!(circular_conv2d(&x, &w), Err(Error::Shape(_))));
    }

    #[test]
    fn blurpool_constant_and_out_of_band_cosine() {
        let x = Tensor3::full(2, 8, 8, 1.25);
        let y = blurpool(&x, 2).unwrap();
        assert_eq!(y.shape(), (2, 4, 4));
        assert!(y.data().iter().all(|v| (v - 1.25).abs() < 1e-12));

        // Horizontal cosine above the post-downsampling band vanishes.
        let mut t = Tensor3::zeros(1, 8, 8);
        for i in 0..8 {
            for j in 0..8 {
                t.set(0, i, j, (2.0 * std::f64::consts::PI * 3.0 * j as f64 / 8.0).cos());
            }
        }
        let y = blurpool(&t, 2).unwrap();
        assert!(y.data().iter().all(|v| v.abs() < 1e-12));

        assert!(blurpool(&Tensor3::zeros(1, 6, 6), 4).is_err());
    }

    #[test]
    fn gelu_values() {
        assert_eq!(gelu_scalar(0.0), 0.0);
        // 1 * Phi(1); the erf backend is good to ~1e-11 here.
        assert!((gelu_scalar(1.0) - 0.8413447460685429).abs() < 1e-9);
        assert!(gelu_scalar(-10.0).abs() < 1e-6);
        assert!((gelu_scalar(30.0) - 30.0).abs() < 1e-9);
    }

    #[test]
    fn gelu_fit_matches_frozen_reference() {
        // Reference computed with an independent least-squares solve of the
        // same 1001-point grid. a1 is exactly 1/2 because GeLU(x) - x/2 is an
        // even function on the symmetric fit interval.
        let [a0, a1, a2] = fit_gelu_coeffs();
        assert!((a0 - 0.016712666726955).abs() < 1e-9);
        assert!((a1 - 0.5).abs() < 1e-12);
        assert!((a2 - 0.308401163818492).abs() < 1e-9);

        let mut max_err: f64 = 0.0;
        for i in 0..=2000 {
            let x = -std::f64::consts::SQRT_2 + std::f64::consts::SQRT_2 * i as f64 / 1000.0;
            let fit = a0 + a1 * x + a2 * x * x;
            max_err = max_err.max((fit - gelu_scalar(x)).abs());
        }
        assert!(max_err < 0.06, "max abs error {max_err}");
        assert!(a1 > 0.0 && a1 < 1.0 && a2 > 0.0);
    }

    #[test]
    fn quadratic_fit_recovers_exactly_representable_functions() {
        let c = fit_quadratic_on_gelu_range(|x| x);
        assert!(c[0].abs() < 1e-10 && (c[1] - 1.0).abs() < 1e-10 && c[2].abs() < 1e-10);

        let c = fit_quadratic_on_gelu_range(|x| 2.0 - 0.5 * x + 3.0 * x * x);
        assert!((c[0] - 2.0).abs() < 1e-10);
        assert!((c[1] + 0.5).abs() < 1e-10);
        assert!((c[2] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn poly_eval_arithmetic() {
        let p = PolyActivation::uniform(1, [0.0, 1.0, 0.0], 1.0).unwrap();
        let x = lcg_tensor(1, 3, 3, 2);
        assert!(x.max_abs_diff(&poly_eval(&x, &p).unwrap()) < 1e-15);

        let p = PolyActivation::uniform(1, [1.0, 1.0, 1.0], 1.0).unwrap();
        let x = Tensor3::full(1, 1, 1, 2.0);
        assert_eq!(poly_eval(&x, &p).unwrap().get(0, 0, 0), 7.0);

        let p = PolyActivation::uniform(1, [0.0, 1.0, 0.0], 7.0).unwrap();
        let x = Tensor3::full(1, 1, 1, 1.0);
        assert_eq!(poly_eval(&x, &p).unwrap().get(0, 0, 0), 49.0);
    }

    #[test]
    fn poly_gradient_trivial_cases() {
        let p = PolyActivation::uniform(1, [0.3, -0.2, 0.9], 1.0).unwrap();
        let x = lcg_tensor(1, 4, 4, 5);
        let g = poly_coeff_gradient(&x, &p, &Tensor3::zeros(1, 4, 4)).unwrap();
        assert_eq!(g, vec![[0.0; 3]]);

        let x = Tensor3::full(1, 1, 1, 1.0);
        let up = Tensor3::full(1, 1, 1, 1.0);
        let g = poly_coeff_gradient(&x, &p, &up).unwrap();
        assert_eq!(g, vec![[1.0, 1.0, 1.0]]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn poly_gradient_matches_finite_differences() {
        let scale = 7.0;
        let x = lcg_tensor(2, 6, 6, 13);
        let up = lcg_tensor(2, 6, 6, 14);
        let p = PolyActivation::new(vec![[0.1, 0.4, 0.2], [-0.3, 0.6, 0.05]], scale).unwrap();
        let grads = poly_coeff_gradient(&x, &p, &up).unwrap();

        let loss = |p: &PolyActivation| -> f64 {
            poly_eval(&x, p)
                .unwrap()
                .data()
                .iter()
                .zip(up.data())
                .map(|(a, b)| a * b)
                .sum()
        };
        let step = 1e-5;
        for ch in 0..2 {
            for k in 0..3 {
                let mut hi = p.clone();
                hi.coeffs_mut()[ch][k] += step;
                let mut lo = p.clone();
                lo.coeffs_mut()[ch][k] -= step;
                let fd = (loss(&hi) - loss(&lo)) / (2.0 * step);
                let rel = (grads[ch][k] - fd).abs() / fd.abs().max(1e-12);
                assert!(rel < 1e-6, "ch={ch} k={k}: analytic {} vs fd {fd}", grads[ch][k]);
            }
        }
    }

    #[test]
    fn alias_free_poly_trivial_cases() {
        // Degree-1 coefficients commute with the resampling sandwich; on a
        // Nyquist-clean input the wrapper is exactly transparent.
        let p = PolyActivation::uniform(1, [0.0, 1.0, 0.0], 1.0).unwrap();
        let x = spectral::nyquist_sanitize_2d(&lcg_tensor(1, 8, 8, 17));
        let y = alias_free_poly(&x, &p).unwrap();
        assert!(x.max_abs_diff(&y) < 1e-10);

        let p = PolyActivation::uniform(2, [0.25, -1.0, 0.5], 3.0).unwrap();
        let x = Tensor3::full(2, 4, 4, 0.8);
        let y = alias_free_poly(&x, &p).unwrap();
        let want = crate::oracle::scaled_poly2(0.8, [0.25, -1.0, 0.5], 3.0);
        assert!(y.data().iter().all(|v| (v - want).abs() < 1e-10));
    }

    #[test]
    fn lpf_poly_trivial_cases() {
        // a2 = 0 reduces to an affine map regardless of cutoff.
        let p = PolyActivation::uniform(1, [0.7, -0.4, 0.0], 2.0).unwrap();
        let x = lcg_tensor(1, 8, 8, 23);
        let y = lpf_poly(&x, &p, Cutoff::new(1, 2).unwrap()).unwrap();
        for (v, o) in x.data().iter().zip(y.data()) {
            let want = 2.0 * (0.7 + -0.4 * (2.0 * v));
            assert!((o - want).abs() < 1e-12);
        }

        // Constant input: LPF passes DC, so the full quadratic applies.
        let p = PolyActivation::uniform(1, [0.1, 0.2, 0.3], 1.5).unwrap();
        let x = Tensor3::full(1, 4, 4, -1.1);
        let y = lpf_poly(&x, &p, lpf_poly_default_cutoff()).unwrap();
        let want = crate::oracle::scaled_poly2(-1.1, [0.1, 0.2, 0.3], 1.5);
        assert!(y.data().iter().all(|v| (v - want).abs() < 1e-12));

        assert!(lpf_poly(&x, &p, Cutoff::full()).is_err());
    }

    #[test]
    fn af_layernorm_trivial_cases() {
        // All channels and pixels equal: centering yields zero, output = beta.
        let n = NormParams::new(vec![2.0, 2.0], vec![0.5, -0.5], NORM_EPS).unwrap();
        let x = Tensor3::full(2, 4, 4, 3.3);
        let y = af_layernorm(&x, &n).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((y.get(0, i, j) - 0.5).abs() < 1e-12);
                assert!((y.get(1, i, j) + 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn af_layernorm_unit_sigma_passes_centered_signal() {
        // Two channels mirrored around zero: centering is identity on the
        // difference structure; choose values so the layer RMS is 1.
        let mut x = Tensor3::zeros(2, 2, 2);
        for (idx, v) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
            x.set(0, idx / 2, idx % 2, *v);
            x.set(1, idx / 2, idx % 2, -*v);
        }
        let n = NormParams::new(vec![1.0, 1.0], vec![0.0, 0.0], 1e-12).unwrap();
        let y = af_layernorm(&x, &n).unwrap();
        assert!(x.max_abs_diff(&y) < 1e-6);
    }

    #[test]
    fn pixelwise_layernorm_trivial_cases() {
        // Single channel: centering annihilates the signal, output = beta.
        let n = NormParams::new(vec![3.0], vec![0.25], NORM_EPS).unwrap();
        let x = lcg_tensor(1, 4, 4, 31);
        let y = layernorm_pixelwise(&x, &n).unwrap();
        assert!(y.data().iter().all(|v| (v - 0.25).abs() < 1e-12));

        // Channel-constant pixels collapse to beta as well.
        let n = NormParams::new(vec![1.0; 3], vec![-0.75; 3], NORM_EPS).unwrap();
        let x = Tensor3::full(3, 2, 2, 9.0);
        let y = layernorm_pixelwise(&x, &n).unwrap();
        assert!(y.data().iter().all(|v| (v + 0.75).abs() < 1e-12));
    }

    #[test]
    fn pooling_and_head() {
        let mut x = Tensor3::zeros(2, 2, 2);
        for i in 0..2 {
            for j in 0..2 {
                x.set(0, i, j, 4.0);
                x.set(1, i, j, (i * 2 + j) as f64);
            }
        }
        let pooled = global_avg_pool(&x);
        assert_eq!(pooled, vec![4.0, 1.5]);

        // Pooling is exactly invariant to integer rolls.
        let rolled = fractional_shift_2d(&x, &RationalShift::new(1, 1, 1, 1).unwrap()).unwrap();
        assert_eq!(global_avg_pool(&rolled), pooled);

        let head = LinearWeights::new(vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0], vec![0.0, 0.0, 10.0], 3, 2)
            .unwrap();
        let logits = linear_head(&pooled, &head).unwrap();
        assert_eq!(logits, vec![4.0, 1.5, 15.5]);
    }

    #[test]
    fn pooling_invariant_to_fractional_shifts_of_clean_input() {
        let x = spectral::nyquist_sanitize_2d(&lcg_tensor(3, 8, 8, 41));
        let pooled = global_avg_pool(&x);
        let shifted = fractional_shift_2d(&x, &RationalShift::new(1, 2, 3, 4).unwrap()).unwrap();
        let pooled_shifted = global_avg_pool(&shifted);
        for (a, b) in pooled.iter().zip(&pooled_shifted) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
