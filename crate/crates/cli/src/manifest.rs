use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::write_text;

/// Record of one run, written next to its outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub subcommand: String,
    pub config_path: Option<PathBuf>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub parameters: serde_json::Value,
    /// Full argument vector; `faultloc replay` re-executes it.
    pub args: Vec<String>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

impl RunManifest {
    pub fn write(&self, out: &Path) -> CliResult<PathBuf> {
        let path = manifest_path(out);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serialises");
        text.push('\n');
        write_text(&path, &text)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(path, e))
    }
}
