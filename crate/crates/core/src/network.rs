//! Small ConvNeXt-style classification networks in two variants: `baseline`
//! (aliasing: strided convolutions, GeLU, per-pixel LayerNorm) and `afc`
//! (alias-free: BlurPool, polynomial activations, per-layer-scale LayerNorm).
//!
//! Networks are built from seeded Gaussian weights, are immutable after
//! construction, and expose per-layer output taps so the metrics module can
//! measure shift equivariance layer by layer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layers::{self, ConvWeights, LinearWeights, NormParams, PolyActivation};
use crate::tensor::Tensor3;

/// Standard deviation of the Gaussian weight initialization.
pub const WEIGHT_INIT_STD: f64 = 0.02;

/// Expansion ratio of the pointwise MLP inside each block.
pub const BLOCK_EXPANSION: usize = 4;

/// Which architecture family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Strided convolutions, GeLU, per-pixel LayerNorm.
    Baseline,
    /// BlurPool, alias-free polynomial activations, alias-free LayerNorm.
    Afc,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Baseline => write!(f, "baseline"),
            Variant::Afc => write!(f, "afc"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Variant::Baseline),
            "afc" => Ok(Variant::Afc),
            other => Err(Error::config(format!(
                "unknown variant {other:?}, expected \"baseline\" or \"afc\""
            ))),
        }
    }
}

fn default_input_channels() -> usize {
    3
}

fn default_stem_stride() -> usize {
    4
}

fn default_scale() -> f64 {
    7.0
}

/// Architecture and initialization description of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub variant: Variant,
    /// Square input resolution (height == width).
    pub input_size: usize,
    #[serde(default = "default_input_channels")]
    pub input_channels: usize,
    #[serde(default = "default_stem_stride")]
    pub stem_stride: usize,
    /// Channel width per stage.
    pub widths: Vec<usize>,
    /// Blocks per stage; must have the same length as `widths`.
    pub blocks: Vec<usize>,
    pub classes: usize,
    pub seed: u64,
    /// Activation scale `c` of the polynomial activations.
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl NetworkSpec {
    /// Desk-scale default: 3x32x32 input, widths [8, 16], one block per
    /// stage, 10 classes.
    pub fn desk_default(variant: Variant, seed: u64) -> Self {
        Self {
            variant,
            input_size: 32,
            input_channels: 3,
            stem_stride: 4,
            widths: vec![8, 16],
            blocks: vec![1, 1],
            classes: 10,
            seed,
            scale: default_scale(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![16, 32, 64].contains(&self.input_size) {
            return Err(Error::config(format!(
                "input_size must be one of 16, 32, 64; got {}",
                self.input_size
            )));
        }
        if self.input_channels == 0 {
            return Err(Error::config("input_channels must be positive"));
        }
        if self.stem_stride != 4 {
            return Err(Error::config(format!(
                "stem_stride is fixed at 4, got {}",
                self.stem_stride
            )));
        }
        if self.widths.is_empty() || self.widths.len() != self.blocks.len() {
            return Err(Error::config(
                "widths and blocks must be non-empty lists of equal length",
            ));
        }
        if self.widths.contains(&0) || self.blocks.contains(&0) {
            return Err(Error::config("stage widths and block counts must be positive"));
        }
        if self.classes == 0 {
            return Err(Error::config("classes must be positive"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::config(format!("scale must be positive, got {}", self.scale)));
        }
        let total_stride = self.total_stride();
        if !self.input_size.is_multiple_of(total_stride) {
            return Err(Error::config(format!(
                "input_size {} not divisible by the total stride {total_stride}",
                self.input_size
            )));
        }
        Ok(())
    }

    /// Product of all strides: the stem's 4 and a 2 per stage transition.
    pub fn total_stride(&self) -> usize {
        self.stem_stride << (self.widths.len() - 1)
    }

    /// Serializes the spec as a TOML document.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("network spec is serializable")
    }

    /// Parses a spec from TOML and validates it.
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: NetworkSpec =
            toml::from_str(text).map_err(|e| Error::config(format!("network spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// One captured layer output together with the product of strides applied up
/// to and including that layer.
#[derive(Debug, Clone)]
pub struct LayerTap {
    pub name: String,
    pub output: Tensor3,
    pub cumulative_stride: usize,
}

#[derive(Debug, Clone)]
struct Block {
    dwconv: ConvWeights,
    norm: NormParams,
    expand: ConvWeights,
    project: ConvWeights,
    poly: Option<PolyActivation>, // None = GeLU baseline
}

#[derive(Debug, Clone)]
struct Downsample {
    norm: NormParams,
    conv: ConvWeights,
}

/// An immutable, fully initialized network.
#[derive(Debug, Clone)]
pub struct Network {
    spec: NetworkSpec,
    stem: ConvWeights,
    stem_poly: Option<PolyActivation>, // LPF-Poly coefficients (afc only)
    stages: Vec<Vec<Block>>,
    downsamples: Vec<Downsample>,
    final_norm: NormParams,
    head: LinearWeights,
}

/// Parameter totals per layer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamBreakdown {
    pub conv: usize,
    pub norm: usize,
    pub activation: usize,
    pub head: usize,
}

impl ParamBreakdown {
    pub fn total(&self) -> usize {
        self.conv + self.norm + self.activation + self.head
    }
}

/// Builds a network with seeded Gaussian weights (std 0.02, zero biases,
/// identity norms) and GeLU-fitted polynomial coefficients.
///
/// Both variants draw their convolution weights in the same order from the
/// same generator, so a baseline and an afc network with equal specs carry
/// identical convolution parameters.
pub fn build_network(spec: &NetworkSpec) -> Result<Network> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, WEIGHT_INIT_STD).expect("valid normal");
    let mut draw = |count: usize| -> Vec<f64> {
        (0..count).map(|_| normal.sample(&mut rng)).collect()
    };
    let is_afc = spec.variant == Variant::Afc;
    let gelu_fit = layers::fit_gelu_coeffs();
    let poly_for = |channels: usize| -> Result<PolyActivation> {
        PolyActivation::uniform(channels, gelu_fit, spec.scale)
    };

    let w0 = spec.widths[0];
    let stem = ConvWeights::new(
        draw(w0 * spec.input_channels * spec.stem_stride * spec.stem_stride),
        vec![0.0; w0],
        w0,
        spec.input_channels,
        spec.stem_stride,
        spec.stem_stride,
        1,
    )?;
    let stem_poly = if is_afc { Some(poly_for(w0)?) } else { None };

    let mut stages = Vec::with_capacity(spec.widths.len());
    let mut downsamples = Vec::new();
    for (stage_idx, (&width, &nblocks)) in spec.widths.iter().zip(&spec.blocks).enumerate() {
        if stage_idx > 0 {
            let prev = spec.widths[stage_idx - 1];
            downsamples.push(Downsample {
                norm: NormParams::identity(prev),
                conv: ConvWeights::new(
                    draw(width * prev * 2 * 2),
                    vec![0.0; width],
                    width,
                    prev,
                    2,
                    2,
                    1,
                )?,
            });
        }
        let mut blocks = Vec::with_capacity(nblocks);
        for _ in 0..nblocks {
            let expanded = BLOCK_EXPANSION * width;
            blocks.push(Block {
                dwconv: ConvWeights::new(
                    draw(width * 7 * 7),
                    vec![0.0; width],
                    width,
                    1,
                    7,
                    7,
                    width,
                )?,
                norm: NormParams::identity(width),
                expand: ConvWeights::new(
                    draw(expanded * width),
                    vec![0.0; expanded],
                    expanded,
                    width,
                    1,
                    1,
                    1,
                )?,
                project: ConvWeights::new(
                    draw(width * expanded),
                    vec![0.0; width],
                    width,
                    expanded,
                    1,
                    1,
                    1,
                )?,
                poly: if is_afc { Some(poly_for(expanded)?) } else { None },
            });
        }
        stages.push(blocks);
    }

    let last_width = *spec.widths.last().unwrap();
    let final_norm = NormParams::identity(last_width);
    let head = LinearWeights::new(
        draw(spec.classes * last_width),
        vec![0.0; spec.classes],
        spec.classes,
        last_width,
    )?;

    Ok(Network {
        spec: spec.clone(),
        stem,
        stem_poly,
        stages,
        downsamples,
        final_norm,
        head,
    })
}

impl Network {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn variant(&self) -> Variant {
        self.spec.variant
    }

    /// Deterministic forward pass. With `capture` every layer boundary
    /// produces a [`LayerTap`] carrying its cumulative stride.
    pub fn forward(&self, x: &Tensor3, capture: bool) -> Result<(Vec<f64>, Vec<LayerTap>)> {
        let (c, h, w) = x.shape();
        if c != self.spec.input_channels || h != self.spec.input_size || w != self.spec.input_size {
            return Err(Error::shape(format!(
                "input shape {:?} does not match spec ({}, {}, {})",
                x.shape(),
                self.spec.input_channels,
                self.spec.input_size,
                self.spec.input_size
            )));
        }
        let mut taps = Vec::new();
        let mut tap = |name: String, t: &Tensor3, stride: usize| {
            if capture {
                taps.push(LayerTap {
                    name,
                    output: t.clone(),
                    cumulative_stride: stride,
                });
            }
        };

        let is_afc = self.spec.variant == Variant::Afc;
        let s0 = self.spec.stem_stride;
        let mut t;
        if is_afc {
            t = layers::circular_conv2d(x, &self.stem)?;
            tap("stem.conv".into(), &t, 1);
            t = layers::lpf_poly(
                &t,
                self.stem_poly.as_ref().unwrap(),
                layers::lpf_poly_default_cutoff(),
            )?;
            // The raw LPF-Poly output is intentionally band-dirty above
            // π(1 - cutoff); the unit "stem" ends at the BlurPool that
            // removes that band, so the tap sits there.
            t = layers::blurpool(&t, s0)?;
        } else {
            t = layers::circular_conv2d(x, &self.stem)?;
            t = layers::subsample(&t, s0)?;
        }
        let mut stride = s0;
        tap("stem".into(), &t, stride);

        for (stage_idx, blocks) in self.stages.iter().enumerate() {
            if stage_idx > 0 {
                let down = &self.downsamples[stage_idx - 1];
                let prefix = format!("down{stage_idx}");
                t = if is_afc {
                    layers::af_layernorm(&t, &down.norm)?
                } else {
                    layers::layernorm_pixelwise(&t, &down.norm)?
                };
                tap(format!("{prefix}.norm"), &t, stride);
                if is_afc {
                    t = layers::circular_conv2d(&t, &down.conv)?;
                    tap(format!("{prefix}.conv"), &t, stride);
                    t = layers::blurpool(&t, 2)?;
                } else {
                    t = layers::circular_conv2d(&t, &down.conv)?;
                    t = layers::subsample(&t, 2)?;
                }
                stride *= 2;
                tap(prefix, &t, stride);
            }
            for (block_idx, block) in blocks.iter().enumerate() {
                let prefix = format!("s{stage_idx}.b{block_idx}");
                let residual = t.clone();
                t = layers::circular_conv2d(&t, &block.dwconv)?;
                tap(format!("{prefix}.dwconv"), &t, stride);
                t = if is_afc {
                    layers::af_layernorm(&t, &block.norm)?
                } else {
                    layers::layernorm_pixelwise(&t, &block.norm)?
                };
                tap(format!("{prefix}.norm"), &t, stride);
                t = layers::circular_conv2d(&t, &block.expand)?;
                tap(format!("{prefix}.expand"), &t, stride);
                t = match &block.poly {
                    Some(p) => layers::alias_free_poly(&t, p)?,
                    None => layers::gelu(&t),
                };
                tap(format!("{prefix}.act"), &t, stride);
                t = layers::circular_conv2d(&t, &block.project)?;
                tap(format!("{prefix}.project"), &t, stride);
                t = residual.add(&t)?;
                tap(prefix, &t, stride);
            }
        }

        let pooled = layers::global_avg_pool(&t);
        let normed = layers::vector_layernorm(&pooled, &self.final_norm)?;
        let logits = layers::linear_head(&normed, &self.head)?;
        Ok((logits, taps))
    }

    /// Convenience wrapper returning only the logits.
    pub fn logits(&self, x: &Tensor3) -> Result<Vec<f64>> {
        Ok(self.forward(x, false)?.0)
    }

    /// Parameter totals per layer family. Convolution counts are identical
    /// between variants built from the same spec; the afc variant adds three
    /// polynomial coefficients per activation channel.
    pub fn parameter_breakdown(&self) -> ParamBreakdown {
        let mut conv = self.stem.parameter_count();
        let mut norm = self.final_norm.parameter_count();
        let mut activation = self
            .stem_poly
            .as_ref()
            .map(|p| 3 * p.channels())
            .unwrap_or(0);
        for blocks in &self.stages {
            for b in blocks {
                conv += b.dwconv.parameter_count()
                    + b.expand.parameter_count()
                    + b.project.parameter_count();
                norm += b.norm.parameter_count();
                if let Some(p) = &b.poly {
                    activation += 3 * p.channels();
                }
            }
        }
        for d in &self.downsamples {
            conv += d.conv.parameter_count();
            norm += d.norm.parameter_count();
        }
        ParamBreakdown {
            conv,
            norm,
            activation,
            head: self.head.parameter_count(),
        }
    }

    /// All weight tensors in dump order as `(name, shape, values)`.
    pub fn named_parameters(&self) -> Vec<(String, Vec<usize>, Vec<f64>)> {
        let mut out = Vec::new();
        let conv_entries = |name: &str, w: &ConvWeights, out: &mut Vec<(String, Vec<usize>, Vec<f64>)>| {
            let (co, ci, kh, kw) = w.kernel_shape();
            out.push((format!("{name}.kernel"), vec![co, ci, kh, kw], w.kernel().to_vec()));
            out.push((format!("{name}.bias"), vec![co], w.bias().to_vec()));
        };
        let norm_entries = |name: &str, n: &NormParams, out: &mut Vec<(String, Vec<usize>, Vec<f64>)>| {
            out.push((format!("{name}.gamma"), vec![n.channels()], n.gamma().to_vec()));
            out.push((format!("{name}.beta"), vec![n.channels()], n.beta().to_vec()));
        };
        let poly_entries = |name: &str, p: &PolyActivation, out: &mut Vec<(String, Vec<usize>, Vec<f64>)>| {
            let flat: Vec<f64> = p.coeffs().iter().flatten().copied().collect();
            out.push((format!("{name}.coeffs"), vec![p.channels(), 3], flat));
        };

        conv_entries("stem", &self.stem, &mut out);
        if let Some(p) = &self.stem_poly {
            poly_entries("stem.act", p, &mut out);
        }
        for (stage_idx, blocks) in self.stages.iter().enumerate() {
            if stage_idx > 0 {
                let d = &self.downsamples[stage_idx - 1];
                norm_entries(&format!("down{stage_idx}.norm"), &d.norm, &mut out);
                conv_entries(&format!("down{stage_idx}.conv"), &d.conv, &mut out);
            }
            for (block_idx, b) in blocks.iter().enumerate() {
                let prefix = format!("s{stage_idx}.b{block_idx}");
                conv_entries(&format!("{prefix}.dwconv"), &b.dwconv, &mut out);
                norm_entries(&format!("{prefix}.norm"), &b.norm, &mut out);
                conv_entries(&format!("{prefix}.expand"), &b.expand, &mut out);
                if let Some(p) = &b.poly {
                    poly_entries(&format!("{prefix}.act"), p, &mut out);
                }
                conv_entries(&format!("{prefix}.project"), &b.project, &mut out);
            }
        }
        norm_entries("final_norm", &self.final_norm, &mut out);
        out.push((
            "head.weight".into(),
            vec![self.head.classes(), self.head.features()],
            self.head.weight().to_vec(),
        ));
        out.push(("head.bias".into(), vec![self.head.classes()], self.head.bias().to_vec()));
        out
    }
}

/// Sidecar schema describing the flat weight dump.
#[derive(Debug, Serialize, Deserialize)]
pub struct WeightsSidecar {
    pub schema: u32,
    pub tensors: Vec<TensorEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
    /// Element offset into the flat f64 buffer.
    pub offset: usize,
}

/// Writes all parameters as a flat little-endian f64 binary file plus a JSON
/// sidecar of names, shapes and offsets.
pub fn save_weights(
    net: &Network,
    bin_path: &std::path::Path,
    sidecar_path: &std::path::Path,
) -> std::io::Result<()> {
    let params = net.named_parameters();
    let mut bytes = Vec::new();
    let mut entries = Vec::new();
    let mut offset = 0usize;
    for (name, shape, values) in &params {
        entries.push(TensorEntry {
            name: name.clone(),
            shape: shape.clone(),
            offset,
        });
        offset += values.len();
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(bin_path, bytes)?;
    let sidecar = WeightsSidecar { schema: 1, tensors: entries };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    std::fs::write(sidecar_path, json + "\n")
}

/// Reads a flat little-endian f64 weight dump back into element values.
pub fn read_weights_bin(bin_path: &std::path::Path) -> std::io::Result<Vec<f64>> {
    let bytes = std::fs::read(bin_path)?;
    if bytes.len() % 8 != 0 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "weight file length is not a multiple of 8",
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_gives_bit_identical_weights() {
        let spec = NetworkSpec::desk_default(Variant::Afc, 42);
        let a = build_network(&spec).unwrap();
        let b = build_network(&spec).unwrap();
        for ((na, _, va), (nb, _, vb)) in a.named_parameters().iter().zip(b.named_parameters()) {
            assert_eq!(na, &nb);
            assert_eq!(va, &vb, "parameter {na} differs between builds");
        }
    }

    #[test]
    fn forward_is_deterministic_and_shaped() {
        let spec = NetworkSpec::desk_default(Variant::Afc, 7);
        let net = build_network(&spec).unwrap();
        let x = Tensor3::full(3, 32, 32, 0.1);
        let (l0, taps) = net.forward(&x, true).unwrap();
        let (l1, _) = net.forward(&x, false).unwrap();
        assert_eq!(l0.len(), 10);
        assert!(l0.iter().all(|v| v.is_finite()));
        assert_eq!(l0, l1);
        assert!(!taps.is_empty());
        // Cumulative strides multiply along the tap list.
        for t in &taps {
            assert_eq!(t.output.height() * t.cumulative_stride, 32);
        }
    }

    #[test]
    fn zero_input_through_zero_weight_head_yields_bias() {
        // With Gaussian kernels but zero input, every conv output is its
        // (zero) bias, norms map zero to beta = 0, and the polynomial maps 0
        // to c*a0; the logits must still be finite and deterministic. The
        // sharper contract: a zero-weight head returns exactly its bias.
        let spec = NetworkSpec::desk_default(Variant::Baseline, 3);
        let net = build_network(&spec).unwrap();
        let x = Tensor3::zeros(3, 32, 32);
        let (logits, _) = net.forward(&x, false).unwrap();
        assert!(logits.iter().all(|v| v.is_finite()));

        let mut flat_head_zeroed = build_network(&spec).unwrap();
        flat_head_zeroed.head =
            LinearWeights::new(vec![0.0; 10 * 16], vec![0.25; 10], 10, 16).unwrap();
        let (logits, _) = flat_head_zeroed.forward(&x, false).unwrap();
        assert!(logits.iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn variants_share_conv_parameters_and_differ_by_poly_coeffs() {
        let base_spec = NetworkSpec::desk_default(Variant::Baseline, 11);
        let mut afc_spec = base_spec.clone();
        afc_spec.variant = Variant::Afc;
        let base = build_network(&base_spec).unwrap();
        let afc = build_network(&afc_spec).unwrap();

        let pb = base.parameter_breakdown();
        let pa = afc.parameter_breakdown();
        assert_eq!(pb.conv, pa.conv);
        assert_eq!(pb.norm, pa.norm);
        assert_eq!(pb.head, pa.head);
        assert_eq!(pb.activation, 0);

        // Three coefficients per activation channel: stem LPF-Poly on
        // widths[0], plus the expanded channels of each block.
        let expected = 3 * (8 + BLOCK_EXPANSION * 8 + BLOCK_EXPANSION * 16);
        assert_eq!(pa.activation, expected);

        // Identical draw order: conv kernels agree parameter-for-parameter.
        let base_params: std::collections::BTreeMap<_, _> = base
            .named_parameters()
            .into_iter()
            .map(|(n, _, v)| (n, v))
            .collect();
        for (name, _, values) in afc.named_parameters() {
            if name.ends_with(".kernel") || name.starts_with("head.") {
                assert_eq!(base_params[&name], values, "{name}");
            }
        }
    }

    #[test]
    fn spec_toml_round_trip() {
        let spec = NetworkSpec::desk_default(Variant::Afc, 99);
        let text = spec.to_toml();
        let back = NetworkSpec::from_toml(&text).unwrap();
        assert_eq!(spec, back);

        assert!(NetworkSpec::from_toml("variant = \"afc\"").is_err());
    }

    #[test]
    fn spec_validation_rejects_bad_configs() {
        let mut spec = NetworkSpec::desk_default(Variant::Afc, 1);
        spec.input_size = 24;
        assert!(matches!(spec.validate(), Err(Error::Config(_))));

        let mut spec = NetworkSpec::desk_default(Variant::Afc, 1);
        spec.blocks = vec![1];
        assert!(spec.validate().is_err());

        let mut spec = NetworkSpec::desk_default(Variant::Afc, 1);
        spec.widths = vec![8, 16, 32, 64];
        spec.blocks = vec![1, 1, 1, 1];
        // Total stride 32 on a 32-pixel input leaves a 1x1 map: allowed.
        assert!(spec.validate().is_ok());
        spec.input_size = 16;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn constant_output_network_is_a_degenerate_adversarial_control() {
        // All-equal logits tie-break to class 0, so accuracy equals the
        // fraction of label-0 samples regardless of the grid.
        let spec = NetworkSpec::desk_default(Variant::Baseline, 17);
        let mut net = build_network(&spec).unwrap();
        net.head = LinearWeights::new(vec![0.0; 10 * 16], vec![0.5; 10], 10, 16).unwrap();

        let inputs = crate::metrics::random_sanitized_inputs(18, 6, 3, 32, 32);
        let labels = vec![0, 1, 0, 2, 0, 9];
        let expected = 3.0 / 6.0;
        for kind in [
            crate::metrics::GridKind::Integer { bound: 2 },
            crate::metrics::GridKind::Half { bound: 2 },
        ] {
            let grid = crate::metrics::make_grid(kind).unwrap();
            let acc =
                crate::metrics::adversarial_accuracy(&net, &inputs, &labels, &grid).unwrap();
            assert_eq!(acc, expected);
        }
    }

    #[test]
    fn weight_dump_round_trips() {
        let dir = std::env::temp_dir().join(format!("afc-weights-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let bin = dir.join("weights.bin");
        let sidecar = dir.join("weights.shapes.json");

        let spec = NetworkSpec::desk_default(Variant::Afc, 5);
        let net = build_network(&spec).unwrap();
        save_weights(&net, &bin, &sidecar).unwrap();

        let flat = read_weights_bin(&bin).unwrap();
        let parsed: WeightsSidecar =
            serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
        assert_eq!(parsed.schema, 1);

        let params = net.named_parameters();
        assert_eq!(parsed.tensors.len(), params.len());
        let total: usize = params.iter().map(|(_, _, v)| v.len()).sum();
        assert_eq!(flat.len(), total);
        for (entry, (name, shape, values)) in parsed.tensors.iter().zip(&params) {
            assert_eq!(&entry.name, name);
            assert_eq!(&entry.shape, shape);
            assert_eq!(entry.shape.iter().product::<usize>(), values.len());
            assert_eq!(&flat[entry.offset..entry.offset + values.len()], &values[..]);
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
