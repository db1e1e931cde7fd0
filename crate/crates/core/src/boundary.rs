//! Boundary precision: match gold and hypothesis phone tiers, compute
//! onset diffs, and aggregate them into per-class statistics, histograms,
//! and misalignment flags.
//!
//! The diff sign convention is fixed: `diff_ms = (hyp.xmin - gold.xmin) *
//! 1000`, so a positive value means the hypothesis onset was placed after
//! the human-annotated one.
//!
//! Tier matching is by label sequence, not time overlap: both tiers derive
//! from the same transcript, and overlap matching would bias diffs toward
//! small values. Identical sequences pair positionally; otherwise a
//! minimal-edit alignment (unit costs, maximum label matches among
//! minimal-cost alignments) pairs only substitution-free matches, and
//! inserted, deleted, or substituted intervals become diagnostics.

use crate::diagnostics::Diagnostics;
use crate::inventory::NaturalClassMap;
use crate::textgrid::{Interval, IntervalTier};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundaryError {
    #[error("tier {tier:?} has no labelled intervals")]
    EmptyTier { tier: String },

    #[error("{file}: unknown phone {phone:?}")]
    UnknownPhone { phone: String, file: String },

    #[error("failed to write csv: {0}")]
    Csv(String),
}

/// One label-matched gold/hypothesis interval pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPair {
    pub phone: String,
    pub gold: Interval,
    pub hyp: Interval,
    /// Label of the word-tier interval containing the gold phone's
    /// midpoint; empty when no word tier was supplied.
    pub word: String,
    pub file: String,
    /// Index of the phone within its word, or within the whole tier when
    /// no word tier was supplied.
    pub position: usize,
}

/// A pair with its onset diff attached.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDiff {
    pub pair: AlignmentPair,
    pub diff_ms: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Score {
    cost: u32,
    matches: u32,
}

impl Score {
    fn better(self, other: Score) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.matches > other.matches)
    }
}

/// (word, position) for each labelled gold interval, by midpoint
/// containment in the word tier.
fn word_context(labelled: &[&Interval], words: Option<&IntervalTier>) -> Vec<(String, usize)> {
    let Some(words) = words else {
        return labelled
            .iter()
            .enumerate()
            .map(|(i, _)| (String::new(), i))
            .collect();
    };
    let mut counters: BTreeMap<usize, usize> = BTreeMap::new();
    labelled
        .iter()
        .map(|interval| {
            let mid = 0.5 * (interval.xmin + interval.xmax);
            let idx = words.intervals.partition_point(|w| w.xmax <= mid);
            let idx = if idx == words.intervals.len() {
                // Midpoint at or past the final xmax: attribute to the
                // last word interval rather than dropping context.
                idx.saturating_sub(1)
            } else {
                idx
            };
            match words.intervals.get(idx) {
                Some(w) => {
                    let counter = counters.entry(idx).or_insert(0);
                    let position = *counter;
                    *counter += 1;
                    (w.text.trim().to_string(), position)
                }
                None => (String::new(), 0),
            }
        })
        .collect()
}

/// Pair the labelled intervals of two phone tiers.
///
/// Unpaired intervals are reported through `diagnostics` (insertion,
/// deletion, substitution), never silently dropped. Empty-label intervals
/// (silence) are not eligible for pairing.
pub fn match_tiers(
    gold: &IntervalTier,
    hyp: &IntervalTier,
    words: Option<&IntervalTier>,
    file: &str,
    diagnostics: &mut Diagnostics,
) -> Result<Vec<AlignmentPair>, BoundaryError> {
    let gold_iv: Vec<&Interval> = gold.labelled().collect();
    let hyp_iv: Vec<&Interval> = hyp.labelled().collect();
    if gold_iv.is_empty() {
        return Err(BoundaryError::EmptyTier {
            tier: gold.name.clone(),
        });
    }
    if hyp_iv.is_empty() {
        return Err(BoundaryError::EmptyTier {
            tier: hyp.name.clone(),
        });
    }
    let context = word_context(&gold_iv, words);
    let make_pair = |gi: usize, hi: usize| AlignmentPair {
        phone: gold_iv[gi].text.trim().to_string(),
        gold: gold_iv[gi].clone(),
        hyp: hyp_iv[hi].clone(),
        word: context[gi].0.clone(),
        file: file.to_string(),
        position: context[gi].1,
    };

    let gold_labels: Vec<&str> = gold_iv.iter().map(|i| i.text.trim()).collect();
    let hyp_labels: Vec<&str> = hyp_iv.iter().map(|i| i.text.trim()).collect();
    if gold_labels == hyp_labels {
        return Ok((0..gold_iv.len()).map(|i| make_pair(i, i)).collect());
    }

    // Minimal-edit alignment; among minimal-cost alignments prefer the one
    // with the most equal-label matches so pairing is deterministic.
    let m = gold_iv.len();
    let n = hyp_iv.len();
    let mut dp = vec![vec![Score { cost: 0, matches: 0 }; n + 1]; m + 1];
    for (i, row) in dp.iter_mut().enumerate().skip(1) {
        row[0].cost = i as u32;
    }
    for (j, cell) in dp[0].iter_mut().enumerate().skip(1) {
        cell.cost = j as u32;
    }
    for i in 1..=m {
        for j in 1..=n {
            let eq = gold_labels[i - 1] == hyp_labels[j - 1];
            let diag = Score {
                cost: dp[i - 1][j - 1].cost + u32::from(!eq),
                matches: dp[i - 1][j - 1].matches + u32::from(eq),
            };
            let del = Score {
                cost: dp[i - 1][j].cost + 1,
                matches: dp[i - 1][j].matches,
            };
            let ins = Score {
                cost: dp[i][j - 1].cost + 1,
                matches: dp[i][j - 1].matches,
            };
            // Preference order on exact ties: diagonal, deletion, insertion.
            let mut best = diag;
            if del.better(best) {
                best = del;
            }
            if ins.better(best) {
                best = ins;
            }
            dp[i][j] = best;
        }
    }

    // Backtrace with the same preference order as the fill.
    let mut steps: Vec<(usize, usize, char)> = Vec::new();
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = dp[i][j];
        if i > 0 && j > 0 {
            let eq = gold_labels[i - 1] == hyp_labels[j - 1];
            let diag = Score {
                cost: dp[i - 1][j - 1].cost + u32::from(!eq),
                matches: dp[i - 1][j - 1].matches + u32::from(eq),
            };
            if diag == here {
                steps.push((i - 1, j - 1, if eq { 'm' } else { 's' }));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dp[i - 1][j].cost + 1 == here.cost && dp[i - 1][j].matches == here.matches {
            steps.push((i - 1, 0, 'd'));
            i -= 1;
            continue;
        }
        steps.push((0, j - 1, 'i'));
        j -= 1;
    }
    steps.reverse();

    let mut pairs = Vec::new();
    for (gi, hi, op) in steps {
        match op {
            'm' => pairs.push(make_pair(gi, hi)),
            's' => diagnostics.warn(
                file,
                format!(
                    "substitution: gold {:?} vs hyp {:?} near {} s, intervals not paired",
                    gold_labels[gi], hyp_labels[hi], gold_iv[gi].xmin
                ),
            ),
            'd' => diagnostics.warn(
                file,
                format!(
                    "deletion: gold {:?} at {}..{} s has no hypothesis interval",
                    gold_labels[gi], gold_iv[gi].xmin, gold_iv[gi].xmax
                ),
            ),
            _ => diagnostics.warn(
                file,
                format!(
                    "insertion: hyp {:?} at {}..{} s has no gold interval",
                    hyp_labels[hi], hyp_iv[hi].xmin, hyp_iv[hi].xmax
                ),
            ),
        }
    }
    Ok(pairs)
}

/// One diff per pair: `(hyp.xmin - gold.xmin) * 1000`.
pub fn onset_diffs(pairs: Vec<AlignmentPair>) -> Vec<BoundaryDiff> {
    pairs
        .into_iter()
        .map(|pair| {
            let diff_ms = (pair.hyp.xmin - pair.gold.xmin) * 1000.0;
            BoundaryDiff { pair, diff_ms }
        })
        .collect()
}

/// Mergeable partial statistics over diffs: count, sum, sum of squares,
/// sum of absolute values. Aggregation over any partition of the input
/// merges to the same result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DiffAccumulator {
    n: u64,
    sum_ms: f64,
    sum_sq_ms: f64,
    sum_abs_ms: f64,
}

impl DiffAccumulator {
    pub fn push(&mut self, diff_ms: f64) {
        self.n += 1;
        self.sum_ms += diff_ms;
        self.sum_sq_ms += diff_ms * diff_ms;
        self.sum_abs_ms += diff_ms.abs();
    }

    pub fn merge(&mut self, other: &DiffAccumulator) {
        self.n += other.n;
        self.sum_ms += other.sum_ms;
        self.sum_sq_ms += other.sum_sq_ms;
        self.sum_abs_ms += other.sum_abs_ms;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Mean diff; only meaningful when `n >= 1`.
    pub fn mean_ms(&self) -> f64 {
        self.sum_ms / self.n as f64
    }

    /// Population standard deviation (the observed tokens are treated as
    /// the whole population, not a sample).
    pub fn std_ms(&self) -> f64 {
        let mean = self.mean_ms();
        (self.sum_sq_ms / self.n as f64 - mean * mean).max(0.0).sqrt()
    }

    pub fn mean_abs_ms(&self) -> f64 {
        self.sum_abs_ms / self.n as f64
    }
}

/// Which run produced the diffs, and whether to split rows per file.
#[derive(Debug, Clone)]
pub struct GroupingSpec {
    pub model: String,
    pub setting: String,
    pub split_by_file: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupKey {
    pub model: String,
    pub setting: String,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffStats {
    #[serde(flatten)]
    pub key: GroupKey,
    pub n: u64,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub mean_abs_ms: f64,
}

/// Per-class (optionally per-file) mean, population std, and mean
/// absolute diff. Rows come out in class declaration order, then file
/// order; only observed groups are emitted, so every row has `n >= 1`.
pub fn aggregate(
    diffs: &[BoundaryDiff],
    class_map: &NaturalClassMap,
    spec: &GroupingSpec,
) -> Result<Vec<DiffStats>, BoundaryError> {
    let mut groups: BTreeMap<(usize, Option<String>), DiffAccumulator> = BTreeMap::new();
    for diff in diffs {
        let class_idx = class_map.class_index(&diff.pair.phone).map_err(|_| {
            BoundaryError::UnknownPhone {
                phone: diff.pair.phone.clone(),
                file: diff.pair.file.clone(),
            }
        })?;
        let file = spec.split_by_file.then(|| diff.pair.file.clone());
        groups
            .entry((class_idx, file))
            .or_default()
            .push(diff.diff_ms);
    }
    Ok(groups
        .into_iter()
        .map(|((class_idx, file), acc)| DiffStats {
            key: GroupKey {
                model: spec.model.clone(),
                setting: spec.setting.clone(),
                class: class_map
                    .class_label_at(class_idx)
                    .expect("index from classify")
                    .to_string(),
                file,
            },
            n: acc.n(),
            mean_ms: acc.mean_ms(),
            std_ms: acc.std_ms(),
            mean_abs_ms: acc.mean_abs_ms(),
        })
        .collect())
}

pub const HISTOGRAM_RANGE_MS: f64 = 205.0;
pub const HISTOGRAM_BIN_WIDTH_MS: f64 = 10.0;
pub const HISTOGRAM_BIN_COUNT: usize = 41;

/// The 42 bin edges `-205, -195, ..., 195, 205`. All bins are width 10;
/// the central bin spans `[-5, 5]` (there is no edge at zero).
pub fn histogram_bin_edges() -> Vec<f64> {
    (0..=HISTOGRAM_BIN_COUNT)
        .map(|k| -HISTOGRAM_RANGE_MS + HISTOGRAM_BIN_WIDTH_MS * k as f64)
        .collect()
}

/// Quantize a diff to 1e-6 ms (nanosecond resolution) before binning.
///
/// Annotation times are decimal; a diff meant to be exactly -205 ms can
/// come out of f64 arithmetic as -205.00000000000007 and would otherwise
/// fall outside the plotted range. Quantizing restores the intended edge
/// semantics; real boundary differences are never sub-nanosecond.
pub fn quantize_diff_ms(diff_ms: f64) -> f64 {
    (diff_ms * 1e6).round() / 1e6
}

/// Bin index for a diff, or `None` when it falls outside
/// `[-205, 205]`. Bins are `[lo, hi)` except the last, `[195, 205]`.
pub fn histogram_bin_index(diff_ms: f64) -> Option<usize> {
    let q = quantize_diff_ms(diff_ms);
    if !(-HISTOGRAM_RANGE_MS..=HISTOGRAM_RANGE_MS).contains(&q) {
        return None;
    }
    if q == HISTOGRAM_RANGE_MS {
        return Some(HISTOGRAM_BIN_COUNT - 1);
    }
    let edges = histogram_bin_edges();
    Some(edges.partition_point(|e| *e <= q) - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramResult {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub in_range_count: u64,
    pub total_count: u64,
    /// `100 * (total - in_range) / total`; zero for empty input.
    pub excluded_pct: f64,
}

pub fn histogram(diffs: &[BoundaryDiff]) -> HistogramResult {
    let mut counts = vec![0u64; HISTOGRAM_BIN_COUNT];
    let mut in_range = 0u64;
    for diff in diffs {
        if let Some(idx) = histogram_bin_index(diff.diff_ms) {
            counts[idx] += 1;
            in_range += 1;
        }
    }
    let total = diffs.len() as u64;
    let excluded_pct = if total == 0 {
        0.0
    } else {
        (total - in_range) as f64 * 100.0 / total as f64
    };
    HistogramResult {
        bin_edges: histogram_bin_edges(),
        counts,
        in_range_count: in_range,
        total_count: total,
        excluded_pct,
    }
}

pub const DEFAULT_MISALIGNMENT_THRESHOLD_MS: f64 = 100.0;
pub const DEFAULT_MISALIGNMENT_LIMIT: usize = 100;

/// The first `limit` pairs, in input (file) order, whose absolute onset
/// diff strictly exceeds `threshold_ms`. Each flag keeps its word context
/// and within-word position for error analysis.
pub fn flag_misalignments(
    pairs: &[AlignmentPair],
    threshold_ms: f64,
    limit: usize,
) -> Vec<BoundaryDiff> {
    assert!(threshold_ms > 0.0, "threshold must be positive");
    let mut flags = Vec::new();
    for pair in pairs {
        if flags.len() == limit {
            break;
        }
        let diff_ms = (pair.hyp.xmin - pair.gold.xmin) * 1000.0;
        if diff_ms.abs() > threshold_ms {
            flags.push(BoundaryDiff {
                pair: pair.clone(),
                diff_ms,
            });
        }
    }
    flags
}

/// CSV with one row per diff: file, word, phone, class, position,
/// gold_onset_s, hyp_onset_s, diff_ms. Numbers use shortest round-trip
/// formatting so a reparse recovers the exact values.
pub fn diffs_to_csv(
    diffs: &[BoundaryDiff],
    class_map: &NaturalClassMap,
) -> Result<String, BoundaryError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "file",
            "word",
            "phone",
            "class",
            "position",
            "gold_onset_s",
            "hyp_onset_s",
            "diff_ms",
        ])
        .map_err(|e| BoundaryError::Csv(e.to_string()))?;
    for diff in diffs {
        let class = class_map.classify(&diff.pair.phone).map_err(|_| {
            BoundaryError::UnknownPhone {
                phone: diff.pair.phone.clone(),
                file: diff.pair.file.clone(),
            }
        })?;
        writer
            .write_record([
                diff.pair.file.as_str(),
                diff.pair.word.as_str(),
                diff.pair.phone.as_str(),
                class,
                &diff.pair.position.to_string(),
                &format!("{}", diff.pair.gold.xmin),
                &format!("{}", diff.pair.hyp.xmin),
                &format!("{}", diff.diff_ms),
            ])
            .map_err(|e| BoundaryError::Csv(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| BoundaryError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| BoundaryError::Csv(e.to_string()))
}

/// CSV with one row per stats group: model, setting, class, file, n,
/// mean_ms, std_ms, mean_abs_ms. The file column is empty for pooled rows.
pub fn stats_to_csv(stats: &[DiffStats]) -> Result<String, BoundaryError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "model",
            "setting",
            "class",
            "file",
            "n",
            "mean_ms",
            "std_ms",
            "mean_abs_ms",
        ])
        .map_err(|e| BoundaryError::Csv(e.to_string()))?;
    for row in stats {
        writer
            .write_record([
                row.key.model.as_str(),
                row.key.setting.as_str(),
                row.key.class.as_str(),
                row.key.file.as_deref().unwrap_or(""),
                &row.n.to_string(),
                &format!("{}", row.mean_ms),
                &format!("{}", row.std_ms),
                &format!("{}", row.mean_abs_ms),
            ])
            .map_err(|e| BoundaryError::Csv(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| BoundaryError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| BoundaryError::Csv(e.to_string()))
}
