//! Subcommand implementations. Each takes the validated [`RunConfig`],
//! runs file-level work on the shared rayon pool (collected in manifest
//! order, so output is deterministic regardless of worker count), and
//! writes its artifacts atomically under the output directory.
//!
//! [`RunConfig`]: crate::config::RunConfig

pub mod dict;
pub mod eval;
pub mod prep;
pub mod validate;
pub mod vowels;

use std::path::{Path, PathBuf};

use aligneval_core::diagnostics::Diagnostics;
use aligneval_core::textgrid::{self, TextGrid};

/// Parse one TextGrid from disk, turning IO and parse failures into error
/// diagnostics rather than aborting the whole run.
fn load_grid(path: &Path, diags: &mut Diagnostics) -> Option<TextGrid> {
    let ctx = path.display().to_string();
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            diags.error(&ctx, format!("cannot read: {e}"));
            return None;
        }
    };
    match textgrid::parse(&bytes) {
        Ok(grid) => Some(grid),
        Err(e) => {
            diags.error(&ctx, e.to_string());
            None
        }
    }
}

/// The gold TextGrid for a manifest entry: the manifest path itself, or
/// the same file name looked up in an explicit gold directory.
fn gold_grid_path(manifest_grid: &Path, gold_dir: Option<&Path>) -> PathBuf {
    match (gold_dir, manifest_grid.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => manifest_grid.to_path_buf(),
    }
}

/// The hypothesis counterpart of a gold file: same file name, different
/// directory.
fn hyp_grid_path(manifest_grid: &Path, hyp_dir: &Path) -> PathBuf {
    match manifest_grid.file_name() {
        Some(name) => hyp_dir.join(name),
        None => hyp_dir.to_path_buf(),
    }
}
