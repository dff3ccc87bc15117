//! Run manifests and output-directory locking.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::write_text;

pub const MANIFEST_NAME: &str = "manifest.toml";
const LOCK_NAME: &str = ".fif.lock";

/// Everything needed to rerun a command. Only the `[timing]` table changes
/// between identical runs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub arguments: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: BTreeMap<String, toml::Value>,
    pub result: BTreeMap<String, toml::Value>,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>) -> Self {
        Self {
            tool: "fif".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            arguments,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: BTreeMap::new(),
            result: BTreeMap::new(),
            timing: Timing { started_unix_seconds: 0.0, wall_clock_seconds: 0.0 },
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.config.insert(key.into(), value.into());
    }

    pub fn record(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.result.insert(key.into(), value.into());
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are always representable in TOML")
    }
}

/// Exclusive use of an output directory for the lifetime of a run.
pub struct OutputDir {
    root: PathBuf,
    lock: PathBuf,
    started: Instant,
    started_unix: f64,
    written: Vec<String>,
}

impl OutputDir {
    pub fn acquire(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        let lock = root.join(LOCK_NAME);
        OpenOptions::new().write(true).create_new(true).open(&lock).map_err(|e| {
            if e.kind() == std::io::ErrorKind::AlreadyExists {
                CliError::Usage(format!(
                    "output directory {} is in use by another run (remove {} if that run died)",
                    root.display(),
                    lock.display()
                ))
            } else {
                CliError::io(&lock, e)
            }
        })?;
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
        Ok(Self { root: root.to_path_buf(), lock, started: Instant::now(), started_unix, written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        write_text(&self.path(name), text)?;
        self.note(name);
        Ok(())
    }

    /// Records a file written by other means.
    pub fn note(&mut self, name: &str) {
        self.written.push(name.to_string());
    }

    pub fn finish(mut self, mut manifest: RunManifest) -> CliResult<()> {
        manifest.outputs = std::mem::take(&mut self.written);
        manifest.outputs.push(MANIFEST_NAME.into());
        manifest.timing = Timing {
            started_unix_seconds: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        write_text(&self.path(MANIFEST_NAME), &manifest.to_toml())
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}
