//! Output plumbing: the meta block, format selection, and deterministic
//! writers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::commands::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Jsonl,
}

/// Config echo + library version; wall time deliberately stays out so
/// outputs are byte-identical for identical (config, seed).
#[derive(Debug, Serialize)]
pub struct Meta<C: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub config: C,
}

impl<C: Serialize> Meta<C> {
    pub fn new(command: &'static str, config: C) -> Self {
        Meta {
            command,
            version: rsp_core::VERSION,
            config,
        }
    }

    /// Leading comment lines for CSV outputs.
    pub fn csv_header(&self) -> Result<String, CliError> {
        let config = serde_json::to_string(&self.config)?;
        Ok(format!(
            "# command={}\n# version={}\n# config={}\n",
            self.command, self.version, config
        ))
    }
}

/// A JSON document {"meta": …, "results": …}.
pub fn json_document<C: Serialize, R: Serialize>(
    meta: &Meta<C>,
    results: &R,
) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Doc<'a, C: Serialize, R: Serialize> {
        meta: &'a Meta<C>,
        results: &'a R,
    }
    let mut text = serde_json::to_string_pretty(&Doc { meta, results })?;
    text.push('\n');
    Ok(text)
}

/// Write to the given path, or stdout when none.
pub fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(path, text)?;
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

pub fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}
