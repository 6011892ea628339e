//! Run manifests: every output file gets a JSON sidecar recording the
//! subcommand, all resolved parameters, seeds, and the tool version, so a
//! run can be reproduced from its artifacts alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Formats with 17 significant digits, which round-trips any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every parameter after default resolution, floats in 17-digit form.
    pub parameters: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub version: String,
    /// Excluded from reproducibility claims; everything else is stable.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            seeds: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<String>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn param_f64(self, key: &str, value: f64) -> Self {
        let s = fmt_f64(value);
        self.param(key, s)
    }

    pub fn param_f64_list(self, key: &str, values: &[f64]) -> Self {
        let s = values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",");
        self.param(key, s)
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seeds.push(s);
        self
    }

    /// Writes the manifest next to `out` as `<stem>.manifest.json`.
    pub fn write_next_to(&self, out: &Path) -> std::io::Result<PathBuf> {
        let path = sibling(out, ".manifest.json");
        let body = serde_json::to_string_pretty(self).expect("manifest fields serialize");
        std::fs::write(&path, body + "\n")?;
        Ok(path)
    }
}

/// Replaces the extension of `path` with `suffix` (which includes its own
/// leading dot), keeping the directory and stem.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("output");
    path.with_file_name(format!("{stem}{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_17_digit_form() {
        for &x in &[0.1, 1e-12, -2.5, std::f64::consts::PI, 6.1e-300] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sibling_replaces_the_extension() {
        let p = Path::new("/tmp/run/result.mtx");
        assert_eq!(
            sibling(p, ".manifest.json"),
            Path::new("/tmp/run/result.manifest.json")
        );
        assert_eq!(sibling(p, "_trace.csv"), Path::new("/tmp/run/result_trace.csv"));
    }
}
