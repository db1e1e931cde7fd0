//! `aligneval eval`: align gold and hypothesis phone tiers file by file,
//! then emit the full evaluation bundle: per-boundary diffs, per-class
//! statistics, the onset-error histogram figure, mean/std heatmaps, and
//! the flagged gross-misalignment list.

use std::path::Path;

use aligneval_core::boundary::{
    aggregate, diffs_to_csv, flag_misalignments, histogram, match_tiers, onset_diffs,
    stats_to_csv, AlignmentPair, BoundaryDiff, GroupingSpec, DEFAULT_MISALIGNMENT_LIMIT,
    DEFAULT_MISALIGNMENT_THRESHOLD_MS,
};
use aligneval_core::corpus::ManifestEntry;
use aligneval_core::diagnostics::Diagnostics;
use aligneval_core::report::{render_heatmap, render_histogram_grid, FigureKind, FigureSpec};

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

pub fn run(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    strict: bool,
    gold_dir: Option<&Path>,
    hyp_dir: &Path,
    per_file: bool,
) -> Result<(), CliError> {
    use rayon::prelude::*;

    let results: Vec<(Vec<AlignmentPair>, Diagnostics)> = pool.install(|| {
        config
            .entries
            .par_iter()
            .map(|entry| eval_entry(entry, config, gold_dir, hyp_dir))
            .collect()
    });
    let mut diags = Diagnostics::new();
    let mut pairs: Vec<AlignmentPair> = Vec::new();
    for (p, d) in results {
        pairs.extend(p);
        diags.extend(d);
    }
    let diffs: Vec<BoundaryDiff> = onset_diffs(pairs.clone());

    let to_data = |e: aligneval_core::boundary::BoundaryError| CliError::Data(e.to_string());
    output::write_atomic(
        &config.out_dir.join("diffs.csv"),
        diffs_to_csv(&diffs, &config.class_map).map_err(to_data)?.as_bytes(),
    )?;

    let pooled = aggregate(
        &diffs,
        &config.class_map,
        &GroupingSpec {
            model: config.model_tag.clone(),
            setting: config.setting_tag.clone(),
            split_by_file: false,
        },
    )
    .map_err(to_data)?;
    output::write_atomic(
        &config.out_dir.join("stats.csv"),
        stats_to_csv(&pooled).map_err(to_data)?.as_bytes(),
    )?;
    if per_file {
        let split = aggregate(
            &diffs,
            &config.class_map,
            &GroupingSpec {
                model: config.model_tag.clone(),
                setting: config.setting_tag.clone(),
                split_by_file: true,
            },
        )
        .map_err(to_data)?;
        output::write_atomic(
            &config.out_dir.join("stats_per_file.csv"),
            stats_to_csv(&split).map_err(to_data)?.as_bytes(),
        )?;
    }

    let flagged = flag_misalignments(
        &pairs,
        DEFAULT_MISALIGNMENT_THRESHOLD_MS,
        DEFAULT_MISALIGNMENT_LIMIT,
    );
    output::write_atomic(
        &config.out_dir.join("flagged.csv"),
        diffs_to_csv(&flagged, &config.class_map).map_err(to_data)?.as_bytes(),
    )?;

    let to_report = |e: aligneval_core::report::ReportError| CliError::Data(e.to_string());
    let hist = histogram(&diffs);
    let hist_spec = FigureSpec::new(
        FigureKind::HistogramGrid,
        vec![config.model_tag.clone()],
        vec![config.setting_tag.clone()],
    )
    .map_err(to_report)?;
    let cell = if hist.total_count > 0 { Some(hist) } else { None };
    output::write_atomic(
        &config.out_dir.join("histogram_grid.svg"),
        &render_histogram_grid(&[vec![cell]], &hist_spec).map_err(to_report)?,
    )?;

    let classes: Vec<String> = config.class_map.class_labels().map(str::to_string).collect();
    for (kind, name) in [
        (FigureKind::HeatmapMeans, "heatmap_means.svg"),
        (FigureKind::HeatmapStds, "heatmap_stds.svg"),
    ] {
        let spec = FigureSpec::new(kind, vec![config.model_tag.clone()], classes.clone())
            .map_err(to_report)?;
        output::write_atomic(
            &config.out_dir.join(name),
            &render_heatmap(&pooled, &spec).map_err(to_report)?,
        )?;
    }

    println!(
        "evaluated {} boundary pair(s) across {} file(s); {} flagged beyond {} ms",
        diffs.len(),
        config.entries.len(),
        flagged.len(),
        DEFAULT_MISALIGNMENT_THRESHOLD_MS
    );
    output::report_diagnostics(&diags, &config.out_dir.join("eval_diagnostics.txt"))?;
    output::outcome(&diags, strict)
}

fn eval_entry(
    entry: &ManifestEntry,
    config: &RunConfig,
    gold_dir: Option<&Path>,
    hyp_dir: &Path,
) -> (Vec<AlignmentPair>, Diagnostics) {
    let mut diags = Diagnostics::new();
    let gold_path = super::gold_grid_path(&entry.path_textgrid, gold_dir);
    let Some(gold) = super::load_grid(&gold_path, &mut diags) else {
        return (Vec::new(), diags);
    };
    let hyp_path = super::hyp_grid_path(&entry.path_textgrid, hyp_dir);
    if !hyp_path.exists() {
        diags.warn(
            hyp_path.display().to_string(),
            "no hypothesis file, gold file skipped",
        );
        return (Vec::new(), diags);
    }
    let Some(hyp) = super::load_grid(&hyp_path, &mut diags) else {
        return (Vec::new(), diags);
    };

    let ctx = gold_path.display().to_string();
    let Some(gold_phones) = gold.interval_tier_checked(&config.phones_tier, &ctx, &mut diags)
    else {
        diags.error(&ctx, format!("no interval tier named {:?}", config.phones_tier));
        return (Vec::new(), diags);
    };
    let hyp_ctx = hyp_path.display().to_string();
    let Some(hyp_phones) = hyp.interval_tier_checked(&config.phones_tier, &hyp_ctx, &mut diags)
    else {
        diags.error(&hyp_ctx, format!("no interval tier named {:?}", config.phones_tier));
        return (Vec::new(), diags);
    };
    let words = gold.interval_tier_checked(&config.words_tier, &ctx, &mut diags);
    let file = entry
        .path_textgrid
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| ctx.clone());
    match match_tiers(gold_phones, hyp_phones, words, &file, &mut diags) {
        Ok(pairs) => (pairs, diags),
        Err(e) => {
            diags.error(&ctx, e.to_string());
            (Vec::new(), diags)
        }
    }
}
