//! Output plumbing: atomic file writes and diagnostics reporting.
//!
//! Every artifact is written to a temporary file in the destination
//! directory and renamed into place, so a crashed or interrupted run
//! never leaves a truncated CSV or SVG behind.

use std::io::Write as _;
use std::path::Path;

use aligneval_core::diagnostics::Diagnostics;

use crate::CliError;

/// Write `bytes` to `path` via a same-directory temp file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let to_err =
        |e: &dyn std::fmt::Display| CliError::Data(format!("{}: write failed: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| to_err(&e))?;
    tmp.write_all(bytes).map_err(|e| to_err(&e))?;
    tmp.as_file().sync_all().map_err(|e| to_err(&e))?;
    tmp.persist(path).map_err(|e| to_err(&e))?;
    Ok(())
}

/// Print diagnostics to stderr and write them next to the other outputs
/// so a run leaves a durable record of what was skipped and why.
pub fn report_diagnostics(diags: &Diagnostics, out_path: &Path) -> Result<(), CliError> {
    let mut text = String::new();
    for d in diags.iter() {
        eprintln!("{d}");
        text.push_str(&d.to_string());
        text.push('\n');
    }
    write_atomic(out_path, text.as_bytes())
}

/// Final exit decision shared by the data-processing subcommands: errors
/// always fail; warnings fail only under --strict.
pub fn outcome(diags: &Diagnostics, strict: bool) -> Result<(), CliError> {
    if diags.has_errors() {
        return Err(CliError::Data(format!(
            "{} error(s) during processing, see diagnostics",
            diags.iter().filter(|d| d.severity == aligneval_core::diagnostics::Severity::Error).count()
        )));
    }
    if strict && !diags.is_empty() {
        return Err(CliError::Data(format!(
            "--strict: {} warning(s) treated as errors",
            diags.len()
        )));
    }
    Ok(())
}
