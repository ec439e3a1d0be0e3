//! Rendering, output routing and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::CliError;

/// Everything needed to reproduce a run. Stored next to the output file so
/// the output itself stays byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Command-line arguments after the program name.
    pub args: Vec<String>,
    pub parameters: serde_json::Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &Command, args: Vec<String>) -> Result<Self, CliError> {
        Ok(Self {
            subcommand: command.name().to_string(),
            args,
            parameters: serde_json::to_value(command).map_err(CliError::runtime)?,
            master_seed: command.master_seed(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `out` (with its manifest) or to standard output.
pub fn emit(body: &str, out: Option<&PathBuf>, manifest: &RunManifest) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| CliError::io(path, e))?;
            let sidecar = sidecar_path(path);
            let text = to_json(manifest)?;
            fs::write(&sidecar, text).map_err(|e| CliError::io(&sidecar, e))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Runtime(format!("writing output: {e}")))
        }
    }
}

/// Pretty JSON document with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::runtime)?;
    s.push('\n');
    Ok(s)
}

/// CSV document from a header and rows.
pub fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row);
        s.push('\n');
    }
    s
}

/// Plot triples `x,y,ci`.
pub fn plot_data(points: impl IntoIterator<Item = (f64, f64, f64)>) -> String {
    csv("x,y,ci", points.into_iter().map(|(x, y, ci)| format!("{x},{y},{ci}")))
}
