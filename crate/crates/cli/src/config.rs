//! Experiment configuration: TOML file merged under command-line flags.

use afc_core::metrics::GridKind;
use afc_core::network::{NetworkSpec, Variant};
use afc_core::spectral::RationalShift;
use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Raw configuration document. Every key is optional; command-line flags
/// override file values, which override built-in defaults.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Must match the invoked subcommand when present.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub size: Option<usize>,
    pub variant: Option<String>,
    pub grid: Option<String>,
    pub delta: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub sizes: Option<Vec<usize>>,
    pub network: Option<NetworkSpec>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: ConfigFile = toml::from_str(&text)
            .with_context(|| format!("config file {}", path.display()))?;
        Ok(cfg)
    }

    pub fn check_experiment(&self, subcommand: &str) -> Result<()> {
        if let Some(exp) = &self.experiment {
            if exp != subcommand {
                bail!(
                    "config key `experiment` is {exp:?} but the {subcommand:?} command was invoked"
                );
            }
        }
        Ok(())
    }
}

/// Variant selection for the equivariance report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantChoice {
    Baseline,
    Afc,
    Both,
}

impl VariantChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Self::Baseline),
            "afc" => Ok(Self::Afc),
            "both" => Ok(Self::Both),
            other => bail!("unknown variant {other:?}, expected baseline, afc or both"),
        }
    }

    pub fn variants(self) -> Vec<Variant> {
        match self {
            Self::Baseline => vec![Variant::Baseline],
            Self::Afc => vec![Variant::Afc],
            Self::Both => vec![Variant::Baseline, Variant::Afc],
        }
    }
}

/// Parses `integer:B`, `half:B` or `frac:k`.
pub fn parse_grid(s: &str) -> Result<GridKind> {
    let (kind, bound) = s
        .split_once(':')
        .with_context(|| format!("grid {s:?} must look like integer:B, half:B or frac:k"))?;
    let bound: u32 = bound
        .parse()
        .with_context(|| format!("grid bound in {s:?} must be a positive integer"))?;
    match kind {
        "integer" => Ok(GridKind::Integer { bound }),
        "half" => Ok(GridKind::Half { bound }),
        "frac" => Ok(GridKind::Fractional { max_den: bound }),
        other => bail!("unknown grid kind {other:?}, expected integer, half or frac"),
    }
}

pub fn parse_delta(s: &str) -> Result<RationalShift> {
    s.parse::<RationalShift>()
        .map_err(|e| anyhow::anyhow!("{e}"))
}

/// Output format of report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => bail!("unknown format {other:?}, expected json or csv"),
        }
    }
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub samples: usize,
    pub network: NetworkSpec,
    pub grid: GridKind,
    pub delta: RationalShift,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Seed offset for harness input generation (keeps input draws independent of
/// the weight draws that use the seed directly).
pub const INPUT_SEED_SALT: u64 = 0xA5A5_5A5A_1234_4321;

/// Seed offset for the frozen-teacher network that defines labels.
pub const TEACHER_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

pub struct CommonFlags {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub size: Option<usize>,
    pub variant: Option<String>,
    pub grid: Option<String>,
    pub delta: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl CommonFlags {
    /// Merges flags over the config file and defaults. `default_variant` is
    /// used when neither a flag nor the config names one.
    pub fn resolve(
        &self,
        subcommand: &str,
        default_variant: &str,
        default_grid: &str,
        default_samples: usize,
    ) -> Result<(Resolved, ConfigFile)> {
        let cfg = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        cfg.check_experiment(subcommand)?;

        let seed = self.seed.or(cfg.seed).unwrap_or(0);
        let samples = self.samples.or(cfg.samples).unwrap_or(default_samples);
        if samples == 0 {
            bail!("samples must be at least 1");
        }
        let size = self.size.or(cfg.size);
        let variant_name = self
            .variant
            .clone()
            .or_else(|| cfg.variant.clone())
            .unwrap_or_else(|| default_variant.to_string());

        let network = match &cfg.network {
            Some(spec) => {
                let mut spec = spec.clone();
                if let Some(size) = size {
                    spec.input_size = size;
                }
                if let Some(flag) = &self.variant {
                    spec.variant = flag.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
                }
                if let Some(seed_flag) = self.seed {
                    spec.seed = seed_flag;
                }
                spec.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
                spec
            }
            None => {
                let variant: Variant = match variant_name.as_str() {
                    // "both" resolves per-variant later; the placeholder spec
                    // carries the shared geometry.
                    "both" => Variant::Afc,
                    v => v.parse().map_err(|e| anyhow::anyhow!("{e}"))?,
                };
                let mut spec = NetworkSpec::desk_default(variant, seed);
                if let Some(size) = size {
                    spec.input_size = size;
                }
                spec.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
                spec
            }
        };

        let grid = parse_grid(
            self.grid
                .as_deref()
                .or(cfg.grid.as_deref())
                .unwrap_or(default_grid),
        )?;
        let delta = parse_delta(
            self.delta
                .as_deref()
                .or(cfg.delta.as_deref())
                .unwrap_or("1/2,1/2"),
        )?;
        let out = self.out.clone().or_else(|| cfg.out.clone());
        let format = Format::parse(
            self.format
                .as_deref()
                .or(cfg.format.as_deref())
                .unwrap_or("json"),
        )?;

        Ok((
            Resolved {
                seed,
                samples,
                network,
                grid,
                delta,
                out,
                format,
            },
            cfg,
        ))
    }

    /// The variant selection string after merging (for equivariance).
    pub fn variant_choice(&self, cfg: &ConfigFile, default: &str) -> Result<VariantChoice> {
        VariantChoice::parse(
            self.variant
                .as_deref()
                .or(cfg.variant.as_deref())
                .unwrap_or(default),
        )
    }
}
