//! `aligneval validate`: parse every WAV and TextGrid in the manifest,
//! check that the configured tiers exist, and report everything found.

use aligneval_core::audio;
use aligneval_core::corpus::ManifestEntry;
use aligneval_core::diagnostics::Diagnostics;

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

pub fn run(config: &RunConfig, pool: &rayon::ThreadPool, strict: bool) -> Result<(), CliError> {
    use rayon::prelude::*;

    let mut diags = Diagnostics::new();
    if config.entries.is_empty() {
        diags.warn(
            config.manifest_path.display().to_string(),
            "manifest lists no files",
        );
    }
    let per_file: Vec<Diagnostics> = pool.install(|| {
        config
            .entries
            .par_iter()
            .map(|entry| check_entry(entry, config))
            .collect()
    });
    for d in per_file {
        diags.extend(d);
    }

    for d in diags.iter() {
        println!("{d}");
    }
    let errors = diags
        .iter()
        .filter(|d| d.severity == aligneval_core::diagnostics::Severity::Error)
        .count();
    println!(
        "checked {} file pair(s): {} error(s), {} warning(s)",
        config.entries.len(),
        errors,
        diags.len() - errors
    );
    output::outcome(&diags, strict)
}

fn check_entry(entry: &ManifestEntry, config: &RunConfig) -> Diagnostics {
    let mut diags = Diagnostics::new();
    let audio_ctx = entry.path_audio.display().to_string();
    match std::fs::read(&entry.path_audio) {
        Ok(bytes) => {
            if let Err(e) = audio::read_wav(&bytes) {
                diags.error(&audio_ctx, e.to_string());
            }
        }
        Err(e) => diags.error(&audio_ctx, format!("cannot read: {e}")),
    }
    let grid_ctx = entry.path_textgrid.display().to_string();
    if let Some(grid) = super::load_grid(&entry.path_textgrid, &mut diags) {
        for tier in [&config.words_tier, &config.phones_tier] {
            if grid.interval_tier_checked(tier, &grid_ctx, &mut diags).is_none() {
                diags.warn(&grid_ctx, format!("no interval tier named {tier:?}"));
            }
        }
    }
    diags
}
