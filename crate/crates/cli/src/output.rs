use std::fs;
use std::path::{Path, PathBuf};

use qcarnot::config::ResolvedConfig;
use qcarnot::{Error, Result};
use serde_json::json;

/// Directory whose files become visible together: everything is written to a
/// sibling `.partial` directory that replaces the target on `commit`.
pub struct Staged {
    target: PathBuf,
    stage: PathBuf,
    files: Vec<String>,
}

impl Staged {
    pub fn new(target: &Path) -> Result<Self> {
        let name = target.file_name().ok_or_else(|| {
            Error::Config(format!(
                "output path {} has no final component",
                target.display()
            ))
        })?;
        let mut stage_name = name.to_os_string();
        stage_name.push(".partial");
        let stage = target.with_file_name(stage_name);
        if stage.exists() {
            fs::remove_dir_all(&stage)?;
        }
        fs::create_dir_all(&stage)?;
        Ok(Self {
            target: target.to_path_buf(),
            stage,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.stage
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.stage.join(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn record(&mut self, written: &[PathBuf]) {
        for p in written {
            if let Some(n) = p.file_name() {
                self.files.push(n.to_string_lossy().into_owned());
            }
        }
    }

    /// Writes manifest.json and moves the staged directory into place.
    pub fn commit(mut self, command: &str, configs: &[&ResolvedConfig]) -> Result<PathBuf> {
        self.files.sort();
        let inputs: Vec<_> = configs
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "content_hash": c.content_hash(),
                    "config": c,
                    "warnings": c.warnings,
                })
            })
            .collect();
        let manifest = json!({
            "command": command,
            "version": qcarnot::VERSION,
            "inputs": inputs,
            "files": self.files,
        });
        fs::write(
            self.stage.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        if self.target.exists() {
            fs::remove_dir_all(&self.target)?;
        }
        fs::rename(&self.stage, &self.target)?;
        Ok(self.target)
    }
}
