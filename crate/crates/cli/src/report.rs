//! Report envelope and on-disk artifacts.

use serde::Serialize;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use multitime::spinor::io::write_field;
use multitime::spinor::MultiTimeField;
use multitime::Error;

pub const REPORT_FILE: &str = "report.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const FIELD_FILE: &str = "field.bin";

/// `v<crate version>`, with `-g<hash>` appended when the build environment
/// sets `MULTITIME_GIT_REV`.
pub fn version_string() -> String {
    match option_env!("MULTITIME_GIT_REV") {
        Some(rev) if !rev.is_empty() => format!("v{}-g{rev}", env!("CARGO_PKG_VERSION")),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub command: &'a str,
    pub version: String,
    pub config_hash: Option<String>,
    pub exit_code: i32,
    pub error: Option<String>,
    pub result: Option<T>,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command: &'a str, config_hash: Option<String>) -> Self {
        Self {
            command,
            version: version_string(),
            config_hash,
            exit_code: 0,
            error: None,
            result: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Error> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_snapshot(dir: &Path, field: &MultiTimeField) -> Result<PathBuf, Error> {
    let path = dir.join(FIELD_FILE);
    let file = fs::File::create(&path).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    write_field(field, BufWriter::new(file))?;
    Ok(path)
}
