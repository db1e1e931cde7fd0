//! Corpus preparation: transcript cleaning, short-word filtering and
//! dataset bookkeeping before aligner training.
//!
//! Field transcripts carry analytical comments ("(coughs)", bracketed
//! notes) and partially uttered words that would poison aligner training.
//! [`clean_transcript`] strips those according to ordered, corpus-specific
//! rules. [`filter_short_words`] empties the labels of words too short to
//! align reliably while keeping the interval timeline intact.

use crate::audio;
use crate::diagnostics::Diagnostics;
use crate::textgrid::{self, IntervalTier};
use regex::Regex;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    /// A strip pattern failed to compile as a regular expression.
    #[error("invalid pattern {pattern:?}: {message}")]
    InvalidPattern { pattern: String, message: String },

    /// The rules file itself is unusable (bad JSON, out-of-domain values).
    #[error("invalid rules: {0}")]
    InvalidRules(String),
}

/// Ordered transcript cleaning configuration.
#[derive(Debug, Clone)]
pub struct CleaningRules {
    strip_patterns: Vec<(Regex, String)>,
    partial_word_markers: Vec<String>,
    /// Words shorter than this (seconds, strict) lose their label.
    pub min_word_duration_s: f64,
}

#[derive(Deserialize)]
struct RawPattern {
    pattern: String,
    #[serde(default)]
    replacement: String,
}

#[derive(Deserialize)]
struct RawRules {
    #[serde(default)]
    strip_patterns: Vec<RawPattern>,
    #[serde(default)]
    partial_word_markers: Vec<String>,
    #[serde(default = "default_min_word_duration")]
    min_word_duration_s: f64,
}

fn default_min_word_duration() -> f64 {
    0.1
}

const DEFAULT_RULES_JSON: &str = include_str!("../data/cleaning_rules.json");

impl CleaningRules {
    /// Parse rules from JSON. Every pattern is compiled up front so a bad
    /// rule fails at load time, not mid-corpus.
    pub fn from_json(json: &str) -> Result<Self, CorpusError> {
        let raw: RawRules =
            serde_json::from_str(json).map_err(|e| CorpusError::InvalidRules(e.to_string()))?;
        if !raw.min_word_duration_s.is_finite() || raw.min_word_duration_s < 0.0 {
            return Err(CorpusError::InvalidRules(format!(
                "min_word_duration_s must be a non-negative number, got {}",
                raw.min_word_duration_s
            )));
        }
        let mut strip_patterns = Vec::with_capacity(raw.strip_patterns.len());
        for p in raw.strip_patterns {
            let regex = Regex::new(&p.pattern).map_err(|e| CorpusError::InvalidPattern {
                pattern: p.pattern.clone(),
                message: e.to_string(),
            })?;
            strip_patterns.push((regex, p.replacement));
        }
        Ok(Self {
            strip_patterns,
            partial_word_markers: raw.partial_word_markers,
            min_word_duration_s: raw.min_word_duration_s,
        })
    }

    /// The rules shipped with the toolkit: parenthesised and bracketed
    /// comments stripped, trailing-hyphen partial words removed, 0.1 s
    /// minimum word duration.
    pub fn defaults() -> Self {
        Self::from_json(DEFAULT_RULES_JSON).expect("embedded default rules are valid")
    }
}

impl Default for CleaningRules {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Normalise one transcript label: apply every strip pattern in order,
/// drop tokens ending in a partial-word marker, collapse whitespace.
pub fn clean_transcript(text: &str, rules: &CleaningRules) -> String {
    let mut s = text.to_string();
    for (regex, replacement) in &rules.strip_patterns {
        s = regex.replace_all(&s, replacement.as_str()).into_owned();
    }
    s.split_whitespace()
        .filter(|token| {
            !rules
                .partial_word_markers
                .iter()
                .any(|marker| !marker.is_empty() && token.ends_with(marker.as_str()))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Empty the label of every word interval strictly shorter than
/// `min_duration_s`. Boundaries are untouched so phone intervals and the
/// audio timeline stay in register.
pub fn filter_short_words(tier: &IntervalTier, min_duration_s: f64) -> IntervalTier {
    let mut out = tier.clone();
    for interval in &mut out.intervals {
        if !interval.is_empty_label() && interval.duration() < min_duration_s {
            interval.text.clear();
        }
    }
    out
}

/// One manifest row: where the recording and its annotation live, and how
/// the file is grouped for training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path_audio: PathBuf,
    pub path_textgrid: PathBuf,
    pub language: String,
    pub split: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LanguageStats {
    pub files: usize,
    pub minutes: f64,
}

/// Dataset bookkeeping computed from a manifest. Durations come from the
/// audio headers; files that fail to parse are reported and excluded.
#[derive(Debug, Clone, Default)]
pub struct DatasetSummary {
    pub files: usize,
    pub total_minutes: f64,
    pub per_language: BTreeMap<String, LanguageStats>,
    pub per_split: BTreeMap<String, f64>,
    pub diagnostics: Diagnostics,
}

/// Read every manifest entry, tally durations per language and per split.
/// Parse failures (audio or TextGrid) become error diagnostics; the
/// remaining files are still summarised.
pub fn assemble_dataset(entries: &[ManifestEntry]) -> DatasetSummary {
    let mut summary = DatasetSummary::default();
    for entry in entries {
        let audio_ctx = entry.path_audio.display().to_string();
        let bytes = match std::fs::read(&entry.path_audio) {
            Ok(b) => b,
            Err(e) => {
                summary.diagnostics.error(&audio_ctx, format!("cannot read: {e}"));
                continue;
            }
        };
        let buffer = match audio::read_wav(&bytes) {
            Ok(b) => b,
            Err(e) => {
                summary.diagnostics.error(&audio_ctx, e.to_string());
                continue;
            }
        };
        let grid_ctx = entry.path_textgrid.display().to_string();
        match std::fs::read(&entry.path_textgrid) {
            Ok(gb) => {
                if let Err(e) = textgrid::parse(&gb) {
                    summary.diagnostics.error(&grid_ctx, e.to_string());
                    continue;
                }
            }
            Err(e) => {
                summary.diagnostics.error(&grid_ctx, format!("cannot read: {e}"));
                continue;
            }
        }

        let minutes = buffer.duration_s() / 60.0;
        summary.files += 1;
        let lang = summary.per_language.entry(entry.language.clone()).or_default();
        lang.files += 1;
        lang.minutes += minutes;
        *summary.per_split.entry(entry.split.clone()).or_default() += minutes;
    }
    // Total over per-language sums, in map order, so the total equals the
    // sum of its parts bit for bit.
    summary.total_minutes = summary.per_language.values().map(|l| l.minutes).sum();
    summary
}
