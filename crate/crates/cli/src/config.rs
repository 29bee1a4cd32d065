use std::path::Path;

use serde::Deserialize;

use crate::OutputFormat;

pub const PRECISION_ENV: &str = "PIERCE_LAB_PRECISION_BITS";

/// Optional settings file. Command-line flags override every field.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub precision_bits: Option<u32>,
    pub format: Option<OutputFormat>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Precision from flag, then environment, then config file, then default.
pub fn resolve_precision(flag: Option<u32>, env: Option<&str>, file: &FileConfig, default: u32) -> Result<u32, String> {
    if let Some(bits) = flag {
        return Ok(bits);
    }
    if let Some(raw) = env {
        return raw
            .trim()
            .parse()
            .map_err(|_| format!("{PRECISION_ENV} must be a non-negative integer, got `{raw}`"));
    }
    Ok(file.precision_bits.unwrap_or(default))
}
