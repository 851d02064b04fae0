//! Versioned JSON archives of trained models and build reports.
//!
//! Floats are written with shortest round-trip formatting, so a loaded model reproduces every
//! online output of the saved one bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use ser_core::rb::ReducedModel;
use ser_core::ser::{BuildOutcome, BuildReport};

use crate::config::Config;
use crate::error::{CliError, Result};

/// Value of the `format` field.
pub const FORMAT: &str = "ser-model";
/// Current archive version.
pub const VERSION: u32 = 1;

/// A trained model with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    /// Always [`FORMAT`].
    pub format: String,
    /// Archive layout version.
    pub version: u32,
    /// [`Config::fingerprint`] of `config`.
    pub fingerprint: String,
    /// Canonical configuration text.
    pub config: String,
    /// Final model.
    pub model: ReducedModel,
    /// Models saved at checkpoints during a rebuild-mode build.
    pub checkpoints: Vec<((usize, usize), ReducedModel)>,
    /// Build log.
    pub report: BuildReport,
}

impl ModelArchive {
    /// Packs a build outcome.
    pub fn new(cfg: &Config, outcome: BuildOutcome) -> Self {
        ModelArchive {
            format: FORMAT.into(),
            version: VERSION,
            fingerprint: cfg.fingerprint(),
            config: cfg.canonical(),
            model: outcome.model,
            checkpoints: outcome.checkpoints,
            report: outcome.report,
        }
    }

    /// The configuration stored in the archive.
    pub fn config(&self) -> Result<Config> {
        Config::parse(&self.config)
    }

    /// The model at `(n, m)`: a saved checkpoint if there is one, a truncation otherwise.
    pub fn model_at(&self, n: usize, m: usize) -> Option<ReducedModel> {
        if let Some((_, model)) = self.checkpoints.iter().find(|(k, _)| *k == (n, m)) {
            return Some(model.clone());
        }
        (n <= self.model.n() && m <= self.model.m()).then(|| self.model.truncated(n, m))
    }

    /// Serializes to JSON bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("archive serializes")
    }

    /// Parses JSON bytes, checking format, version and fingerprint.
    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let archive: ModelArchive = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        if archive.format != FORMAT {
            return Err(format!("not a model archive (format {:?})", archive.format));
        }
        if archive.version != VERSION {
            return Err(format!("archive version {} is not supported (expected {VERSION})", archive.version));
        }
        let cfg = Config::parse(&archive.config).map_err(|e| e.to_string())?;
        if cfg.fingerprint() != archive.fingerprint {
            return Err("fingerprint does not match the stored configuration".into());
        }
        Ok(archive)
    }

    /// Writes the archive to `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| CliError::io(path, e))
    }

    /// Reads an archive from `path`.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        ModelArchive::from_bytes(&bytes).map_err(|reason| CliError::Format {
            path: path.into(),
            reason,
        })
    }
}

/// Pretty JSON of a build report.
pub fn report_json(report: &BuildReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes a build report as JSON.
pub fn write_report(report: &BuildReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report)).map_err(|e| CliError::io(path, e))
}
