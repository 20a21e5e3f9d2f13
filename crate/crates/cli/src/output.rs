use std::fs;
use std::path::{Path, PathBuf};

use elastica_mkdv::io::to_json_string;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;

/// A run's output directory.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn text(&self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(name), contents)?;
        Ok(())
    }

    pub fn json<S: Serialize + ?Sized>(&self, name: &str, value: &S) -> Result<(), CliError> {
        self.text(name, &to_json_string(value))
    }

    /// `run_manifest.json`: the command and the effective configuration.
    pub fn manifest(&self, command: &str, cfg: &RunConfig) -> Result<(), CliError> {
        let manifest: Value = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
        });
        self.json("run_manifest.json", &manifest)
    }
}
