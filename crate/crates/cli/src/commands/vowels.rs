//! `aligneval vowels`: measure F1/F2 for every vowel token under the gold
//! segmentation and each hypothesis segmentation of the same audio, then
//! emit the token table, the per-category ellipse table, and the overlaid
//! vowel chart.

use std::path::{Path, PathBuf};

use aligneval_core::audio::{self, AudioBuffer};
use aligneval_core::corpus::ManifestEntry;
use aligneval_core::diagnostics::Diagnostics;
use aligneval_core::report::render_vowel_chart;
use aligneval_core::textgrid::IntervalTier;
use aligneval_core::vowel::{build_ellipses, measure_vowel, tokens_to_csv, VowelEllipse, VowelToken};

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

/// Reserved model tag for the human annotation series.
const GOLD_TAG: &str = "gold";

pub fn run(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    strict: bool,
    gold_dir: Option<&Path>,
    hyp_dir_args: &[String],
    ellipse_scale: f64,
) -> Result<(), CliError> {
    use rayon::prelude::*;

    let hyp_dirs = parse_hyp_dirs(hyp_dir_args)?;
    let vowel_classes: Vec<&str> = config
        .class_map
        .class_labels()
        .filter(|label| label.contains("vowel"))
        .collect();
    let vowels = config.class_map.phones_in_classes(&vowel_classes);
    if vowels.is_empty() {
        return Err(CliError::Config(vec![
            "class map contains no vowel classes (labels containing \"vowel\")".into(),
        ]));
    }

    let results: Vec<(Vec<VowelToken>, Diagnostics)> = pool.install(|| {
        config
            .entries
            .par_iter()
            .map(|entry| measure_entry(entry, config, gold_dir, &hyp_dirs, &vowels))
            .collect()
    });
    let mut diags = Diagnostics::new();
    let mut tokens: Vec<VowelToken> = Vec::new();
    for (t, d) in results {
        tokens.extend(t);
        diags.extend(d);
    }
    if tokens.is_empty() {
        diags.warn(
            config.manifest_path.display().to_string(),
            "no vowel tokens were measured; the chart will be empty",
        );
    }

    let to_data = |e: aligneval_core::vowel::VowelError| CliError::Data(e.to_string());
    output::write_atomic(
        &config.out_dir.join("vowel_tokens.csv"),
        tokens_to_csv(&tokens).map_err(to_data)?.as_bytes(),
    )?;

    let (gold_tokens, model_tokens): (Vec<VowelToken>, Vec<VowelToken>) =
        tokens.into_iter().partition(|t| t.model == GOLD_TAG);
    let gold_ellipses = build_ellipses(&gold_tokens);
    let model_ellipses = build_ellipses(&model_tokens);
    output::write_atomic(
        &config.out_dir.join("vowel_ellipses.csv"),
        ellipses_to_csv(gold_ellipses.iter().chain(&model_ellipses)).as_bytes(),
    )?;

    // The multiplier only affects drawing; tables keep the plain std.
    let scale = |list: &[VowelEllipse]| -> Vec<VowelEllipse> {
        list.iter()
            .map(|e| VowelEllipse {
                semi_axes: (e.semi_axes.0 * ellipse_scale, e.semi_axes.1 * ellipse_scale),
                ..e.clone()
            })
            .collect()
    };
    output::write_atomic(
        &config.out_dir.join("vowel_chart.svg"),
        &render_vowel_chart(&scale(&model_ellipses), &scale(&gold_ellipses)),
    )?;

    println!(
        "measured {} gold and {} hypothesis vowel token(s) in {} category/ies",
        gold_tokens.len(),
        model_tokens.len(),
        gold_ellipses.len()
    );
    output::report_diagnostics(&diags, &config.out_dir.join("vowels_diagnostics.txt"))?;
    output::outcome(&diags, strict)
}

/// `NAME=DIR` per hypothesis model; a bare `DIR` falls back to the
/// directory's base name as the model tag.
fn parse_hyp_dirs(args: &[String]) -> Result<Vec<(String, PathBuf)>, CliError> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for arg in args {
        let (tag, dir) = match arg.split_once('=') {
            Some((name, dir)) => (name.to_string(), PathBuf::from(dir)),
            None => {
                let dir = PathBuf::from(arg);
                let tag = dir
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                (tag, dir)
            }
        };
        if tag.is_empty() || tag == GOLD_TAG {
            errors.push(format!(
                "--hyp-dir {arg:?}: model tag must be non-empty and not {GOLD_TAG:?}"
            ));
            continue;
        }
        if out.iter().any(|(t, _)| *t == tag) {
            errors.push(format!("--hyp-dir {arg:?}: duplicate model tag {tag:?}"));
            continue;
        }
        out.push((tag, dir));
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Config(errors))
    }
}

fn measure_entry(
    entry: &ManifestEntry,
    config: &RunConfig,
    gold_dir: Option<&Path>,
    hyp_dirs: &[(String, PathBuf)],
    vowels: &std::collections::BTreeSet<String>,
) -> (Vec<VowelToken>, Diagnostics) {
    let mut diags = Diagnostics::new();
    let audio_ctx = entry.path_audio.display().to_string();
    let buffer = match std::fs::read(&entry.path_audio) {
        Ok(bytes) => match audio::read_wav(&bytes) {
            Ok(b) => b,
            Err(e) => {
                diags.error(&audio_ctx, e.to_string());
                return (Vec::new(), diags);
            }
        },
        Err(e) => {
            diags.error(&audio_ctx, format!("cannot read: {e}"));
            return (Vec::new(), diags);
        }
    };

    let file = entry
        .path_textgrid
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| entry.path_textgrid.display().to_string());
    let mut tokens = Vec::new();

    let gold_path = super::gold_grid_path(&entry.path_textgrid, gold_dir);
    if let Some(grid) = super::load_grid(&gold_path, &mut diags) {
        let ctx = gold_path.display().to_string();
        match grid.interval_tier_checked(&config.phones_tier, &ctx, &mut diags) {
            Some(tier) => {
                measure_tier(tier, &buffer, config, vowels, &file, GOLD_TAG, &mut tokens, &mut diags)
            }
            None => diags.error(&ctx, format!("no interval tier named {:?}", config.phones_tier)),
        }
    }
    for (tag, dir) in hyp_dirs {
        let hyp_path = super::hyp_grid_path(&entry.path_textgrid, dir);
        if !hyp_path.exists() {
            diags.warn(hyp_path.display().to_string(), "no hypothesis file, skipped");
            continue;
        }
        let Some(grid) = super::load_grid(&hyp_path, &mut diags) else {
            continue;
        };
        let ctx = hyp_path.display().to_string();
        match grid.interval_tier_checked(&config.phones_tier, &ctx, &mut diags) {
            Some(tier) => {
                measure_tier(tier, &buffer, config, vowels, &file, tag, &mut tokens, &mut diags)
            }
            None => diags.error(&ctx, format!("no interval tier named {:?}", config.phones_tier)),
        }
    }
    (tokens, diags)
}

#[allow(clippy::too_many_arguments)]
fn measure_tier(
    tier: &IntervalTier,
    buffer: &AudioBuffer,
    config: &RunConfig,
    vowels: &std::collections::BTreeSet<String>,
    file: &str,
    model: &str,
    tokens: &mut Vec<VowelToken>,
    diags: &mut Diagnostics,
) {
    for interval in tier.labelled() {
        if !vowels.contains(interval.text.trim()) {
            continue;
        }
        match measure_vowel(buffer, interval, &config.formant, file, model) {
            Ok(token) => tokens.push(token),
            Err(e) => diags.warn(
                format!("{file} [{}..{}] {model}", interval.xmin, interval.xmax),
                format!("token dropped: {e}"),
            ),
        }
    }
}

fn ellipses_to_csv<'a>(ellipses: impl Iterator<Item = &'a VowelEllipse>) -> String {
    let mut out = String::from("model,vowel,n,f2_mean_hz,f1_mean_hz,f2_std_hz,f1_std_hz\n");
    for e in ellipses {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.model, e.vowel, e.n, e.center.0, e.center.1, e.semi_axes.0, e.semi_axes.1
        ));
    }
    out
}
