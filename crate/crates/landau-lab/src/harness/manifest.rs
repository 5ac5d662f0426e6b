//! Run manifest: config hash, software version, wall-clock bounds, emitted
//! files, and summary metrics. CSV payloads are deterministic; the manifest
//! carries the only timestamps.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{LandauError, Result};

use super::config::RunConfig;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_sha256: String,
    pub software_version: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    /// Every file emitted into the output directory (manifest excluded).
    pub files: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            scenario: cfg.scenario.name().to_string(),
            config_sha256: cfg.sha256(),
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            files: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn add_file(&mut self, name: String) {
        self.files.push(name);
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Check the completeness invariant and write `manifest.json`.
    ///
    /// Every emitted file must be listed and the directory must contain
    /// nothing else, so a manifest always describes its directory exactly.
    pub fn finish(mut self, out_dir: &Path) -> Result<RunManifest> {
        self.finished_unix_ms = now_ms();
        self.files.sort();
        let mut on_disk: Vec<String> = std::fs::read_dir(out_dir)?
            .filter_map(|entry| entry.ok())
            .map(|entry| entry.file_name().to_string_lossy().into_owned())
            .filter(|name| name != "manifest.json")
            .collect();
        on_disk.sort();
        if on_disk != self.files {
            return Err(LandauError::Invariant(format!(
                "manifest file list does not match the output directory: emitted [{}], found [{}]",
                self.files.join(", "),
                on_disk.join(", ")
            )));
        }
        let json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(out_dir.join("manifest.json"), json)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completeness_invariant_is_enforced() {
        let dir = std::env::temp_dir().join(format!("landau-man-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("a.csv"), "x\n").unwrap();

        let cfg = RunConfig::default();
        let mut man = RunManifest::new(&cfg);
        man.add_file("a.csv".into());
        man.metric("m", 1.0);
        let man = man.finish(&dir).unwrap();
        assert!(dir.join("manifest.json").is_file());
        assert_eq!(man.files, vec!["a.csv".to_string()]);

        // A stray file the run did not emit breaks the invariant.
        std::fs::write(dir.join("stray.csv"), "y\n").unwrap();
        let mut man = RunManifest::new(&cfg);
        man.add_file("a.csv".into());
        let err = man.finish(&dir).unwrap_err();
        assert!(matches!(err, LandauError::Invariant(_)));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
