//! Deterministic report emission: JSON with sorted keys, CSV with a header
//! row and `.` decimal separators.

use anyhow::{Context, Result};
use serde::Serialize;
use std::path::Path;

/// Report schema version stamped into every document.
pub const SCHEMA: u32 = 1;

/// Fixed description of how harness inputs are produced, included in every
/// report header.
pub const INPUTS_NOTE: &str =
    "synthetic seeded Gaussian images, Nyquist-sanitized via a cutoff-1 LPF";

/// Serializes to JSON with lexicographically sorted keys so identical runs
/// produce byte-identical files.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value).context("serializing report")?;
    let mut text = serde_json::to_string_pretty(&value).context("formatting report")?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Builds a CSV document from a header and rows. Fields never contain commas
/// or quotes here, so no quoting is necessary.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
