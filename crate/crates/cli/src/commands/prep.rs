//! `aligneval prep`: clean word-tier transcripts, blank out words too
//! short to align, write the cleaned grids, and summarise the dataset.
//!
//! Cleaning and filtering are idempotent, so running prep over its own
//! output reproduces it byte for byte.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use aligneval_core::corpus::{
    assemble_dataset, clean_transcript, filter_short_words, DatasetSummary, ManifestEntry,
};
use aligneval_core::diagnostics::Diagnostics;
use aligneval_core::textgrid::{self, Tier};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

#[derive(Serialize)]
struct LanguageRow {
    files: usize,
    minutes: f64,
}

/// JSON projection of [`DatasetSummary`]; maps are ordered so the output
/// is deterministic.
#[derive(Serialize)]
struct SummaryJson {
    files: usize,
    total_minutes: f64,
    per_language: BTreeMap<String, LanguageRow>,
    per_split: BTreeMap<String, f64>,
}

pub fn run(config: &RunConfig, pool: &rayon::ThreadPool, strict: bool) -> Result<(), CliError> {
    use rayon::prelude::*;

    let cleaned_dir = config.out_dir.join("cleaned");
    std::fs::create_dir_all(&cleaned_dir)
        .map_err(|e| CliError::Data(format!("{}: {e}", cleaned_dir.display())))?;

    let mut diags = Diagnostics::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut unique: Vec<&ManifestEntry> = Vec::new();
    for entry in &config.entries {
        let name = entry
            .path_textgrid
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if names.insert(name.clone()) {
            unique.push(entry);
        } else {
            diags.error(
                entry.path_textgrid.display().to_string(),
                format!("output name collision on {name:?}, file skipped"),
            );
        }
    }

    let results: Vec<(Option<(String, String)>, Diagnostics)> = pool.install(|| {
        unique
            .par_iter()
            .map(|entry| clean_entry(entry, config))
            .collect()
    });
    for (out, d) in results {
        diags.extend(d);
        if let Some((name, serialized)) = out {
            output::write_atomic(&cleaned_dir.join(name), serialized.as_bytes())?;
        }
    }

    let summary = assemble_dataset(&config.entries);
    diags.extend(summary.diagnostics.clone());
    print_summary(&summary);
    let json = serde_json::to_string_pretty(&SummaryJson {
        files: summary.files,
        total_minutes: summary.total_minutes,
        per_language: summary
            .per_language
            .iter()
            .map(|(k, v)| (k.clone(), LanguageRow { files: v.files, minutes: v.minutes }))
            .collect(),
        per_split: summary.per_split.clone(),
    })
    .map_err(|e| CliError::Data(format!("summary serialization: {e}")))?;
    output::write_atomic(&config.out_dir.join("dataset_summary.json"), json.as_bytes())?;
    output::report_diagnostics(&diags, &config.out_dir.join("prep_diagnostics.txt"))?;
    output::outcome(&diags, strict)
}

fn clean_entry(
    entry: &ManifestEntry,
    config: &RunConfig,
) -> (Option<(String, String)>, Diagnostics) {
    let mut diags = Diagnostics::new();
    let Some(mut grid) = super::load_grid(&entry.path_textgrid, &mut diags) else {
        return (None, diags);
    };
    for tier in &mut grid.tiers {
        let Tier::Interval(it) = tier else { continue };
        if it.name != config.words_tier {
            continue;
        }
        for interval in &mut it.intervals {
            interval.text = clean_transcript(&interval.text, &config.cleaning);
        }
        *it = filter_short_words(it, config.cleaning.min_word_duration_s);
    }
    let name = entry
        .path_textgrid
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed.TextGrid".into());
    (Some((name, textgrid::serialize(&grid))), diags)
}

fn print_summary(summary: &DatasetSummary) {
    println!("files: {}", summary.files);
    println!("total minutes: {:.2}", summary.total_minutes);
    for (language, stats) in &summary.per_language {
        println!("  {language}: {} file(s), {:.2} min", stats.files, stats.minutes);
    }
    for (split, minutes) in &summary.per_split {
        println!("  split {split}: {minutes:.2} min");
    }
}
