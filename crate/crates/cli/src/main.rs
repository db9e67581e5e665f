//! Command-line front end for the alias-free convnet verification suites.
//!
//! Every command reads an optional TOML config (`--config`), merges flags on
//! top, runs its suite on seeded synthetic inputs, writes a JSON or CSV
//! report, and exits 0 iff every assertion in the selected suite passed.

mod commands;
mod config;
mod reports;

use clap::{Args, Parser, Subcommand};
use config::CommonFlags;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "afc",
    about = "Verification harness for truly alias-free convolutional networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for weights, inputs and shift sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random input samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Square input resolution (16, 32 or 64).
    #[arg(long, global = true)]
    size: Option<usize>,
    /// Network variant: baseline or afc (equivariance also accepts both).
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Translation grid: integer:B, half:B or frac:k.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Fractional shift as m1/n1,m2/n2.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Report path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, global = true)]
    format: Option<String>,
}

impl Common {
    fn flags(&self) -> CommonFlags {
        CommonFlags {
            config: self.config.clone(),
            seed: self.seed,
            samples: self.samples,
            size: self.size,
            variant: self.variant.clone(),
            grid: self.grid.clone(),
            delta: self.delta.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check every resampling kernel against its oracle on random signals.
    VerifySpectral {
        #[command(flatten)]
        common: Common,
        /// Comma-separated signal lengths (default 2,3,4,5,8,15,16,32).
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Testing hook: corrupt the named kernel (lowpass or upsample) so
        /// the failure path is exercised.
        #[arg(long)]
        corrupt_mask: Option<String>,
    },
    /// Per-layer shift-equivariance diff report.
    Equivariance {
        #[command(flatten)]
        common: Common,
    },
    /// Prediction consistency under random translations from a grid.
    Consistency {
        #[command(flatten)]
        common: Common,
    },
    /// Adversarial translation-grid accuracy with frozen-teacher labels.
    Adversarial {
        #[command(flatten)]
        common: Common,
    },
    /// Polynomial-activation coefficient gradients vs finite differences.
    Gradcheck {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::VerifySpectral { common, sizes, corrupt_mask } => {
            let flags = common.flags();
            let (resolved, cfg) = flags.resolve("verify-spectral", "afc", "half:4", 100)?;
            let sizes = sizes
                .or(cfg.sizes)
                .unwrap_or_else(|| commands::verify_spectral::DEFAULT_SIZES.to_vec());
            if sizes.is_empty() || sizes.contains(&0) {
                anyhow::bail!("--sizes must list positive signal lengths");
            }
            let corrupt = corrupt_mask
                .as_deref()
                .map(commands::verify_spectral::CorruptMask::parse)
                .transpose()?;
            let (text, pass) =
                commands::verify_spectral::run(&resolved, &sizes, resolved.samples, corrupt)?;
            reports::emit(resolved.out.as_deref(), &text)?;
            if !pass {
                for line in commands::verify_spectral::failure_summary(&text) {
                    eprintln!("{line}");
                }
            }
            Ok(pass)
        }
        Command::Equivariance { common } => {
            let flags = common.flags();
            let (resolved, cfg) = flags.resolve("equivariance", "both", "half:4", 64)?;
            let choice = flags.variant_choice(&cfg, "both")?;
            let (text, pass) = commands::equivariance::run(&resolved, choice)?;
            reports::emit(resolved.out.as_deref(), &text)?;
            Ok(pass)
        }
        Command::Consistency { common } => {
            let flags = common.flags();
            let (resolved, _) = flags.resolve("consistency", "afc", "half:4", 64)?;
            let (text, pass) = commands::consistency::run(&resolved)?;
            reports::emit(resolved.out.as_deref(), &text)?;
            Ok(pass)
        }
        Command::Adversarial { common } => {
            let flags = common.flags();
            let (resolved, _) = flags.resolve("adversarial", "afc", "frac:4", 64)?;
            let (text, pass) = commands::adversarial::run(&resolved)?;
            reports::emit(resolved.out.as_deref(), &text)?;
            Ok(pass)
        }
        Command::Gradcheck { common } => {
            let flags = common.flags();
            let (resolved, _) = flags.resolve("gradcheck", "afc", "half:4", 50)?;
            let (text, pass) = commands::gradcheck::run(&resolved)?;
            reports::emit(resolved.out.as_deref(), &text)?;
            Ok(pass)
        }
    }
}
