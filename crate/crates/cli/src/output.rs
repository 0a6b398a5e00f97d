//! Output plumbing: 12-significant-digit numeric formatting, provenance
//! headers, and file/stdout routing. Relative output paths resolve under
//! `RELAYER_GAME_OUT_DIR` when that variable is set.

use std::path::{Path, PathBuf};

use crate::CliError;

pub const OUT_DIR_VAR: &str = "RELAYER_GAME_OUT_DIR";

/// 12 significant digits, locale independent.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes to the resolved path, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let full = resolve(path);
            if let Some(parent) = full.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|e| {
                        CliError::Computation(format!(
                            "cannot create {}: {e}",
                            parent.display()
                        ))
                    })?;
                }
            }
            std::fs::write(&full, content).map_err(|e| {
                CliError::Computation(format!("cannot write {}: {e}", full.display()))
            })
        }
    }
}

/// `# key = value` provenance lines for CSV outputs.
pub struct Provenance {
    lines: Vec<String>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        let mut lines = Vec::new();
        lines.push(format!(
            "# artifact = relayer-game {}",
            env!("CARGO_PKG_VERSION")
        ));
        lines.push(format!("# command = {command}"));
        Provenance { lines }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("# {key} = {value}"));
        self
    }

    pub fn header(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

/// Escapes a CSV cell: error messages may contain commas.
pub fn csv_cell(text: &str) -> String {
    if text.contains(',') || text.contains('"') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
