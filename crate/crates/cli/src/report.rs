//! Run reports and atomic artifact writing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use qmem_core::readout::SplitSpec;
use qmem_core::reservoir::ReservoirConfig;

/// Everything a single prediction run records. Serialized as `report.json`;
/// round-trips losslessly (floats use shortest-round-trip decimal form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Report format version.
    pub schema: u32,
    pub task: String,
    pub config: ReservoirConfig,
    pub split: SplitSpec,
    pub seed: u64,
    /// Task-specific generation parameters, echoed for reproducibility.
    pub task_params: serde_json::Value,
    pub weights: [f64; 3],
    pub intercept: f64,
    pub ridge: f64,
    pub rank_deficient: bool,
    pub mse_train: f64,
    pub mse_test: f64,
    pub clamp_events: u64,
    pub artifact_paths: Vec<String>,
}

pub const REPORT_SCHEMA: u32 = 1;

/// Writes bytes atomically: to a temporary sibling first, then renamed over
/// the destination.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let tmp = tmp_sibling(path);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

impl RunReport {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self).context("serializing report")?;
        json.push('\n');
        atomic_write(path, json.as_bytes())
    }

    pub fn read(path: &Path) -> Result<RunReport> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).context("parsing report")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmem_core::encoding::EncodingScheme;
    use qmem_core::memristor::FeedbackRule;

    #[test]
    fn report_round_trips_losslessly() {
        let report = RunReport {
            schema: REPORT_SCHEMA,
            task: "narma".into(),
            config: ReservoirConfig::new(
                EncodingScheme::AmplitudeDirect,
                FeedbackRule::ExpMovingAverage { m_d: 4.0 },
            ),
            split: SplitSpec::new(20, 480, 500),
            seed: 7,
            task_params: serde_json::json!({"points": 1000}),
            weights: [0.1234567890123456, -3.0e-17, 1.0 / 3.0],
            intercept: 0.1 + 0.2,
            ridge: 0.0,
            rank_deficient: true,
            mse_train: 2.5941e-5,
            mse_test: 2.86420017e-5,
            clamp_events: 0,
            artifact_paths: vec!["features.csv".into()],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        report.write(&path).unwrap();
        let back = RunReport::read(&path).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn atomic_write_replaces_existing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("artifact.csv");
        atomic_write(&path, b"old").unwrap();
        atomic_write(&path, b"new").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"new");
        assert!(!tmp_sibling(&path).exists());
    }
}
