//! Praat TextGrid reading and writing.
//!
//! Both "ooTextFile" layouts are accepted on input: the long format with
//! `name = value` lines and the short format with bare values. Output is
//! always the long format. Files are decoded as UTF-8 first, then UTF-16
//! when a byte-order mark is present, then Latin-1 as a last resort, so
//! legacy fieldwork archives load without manual conversion.
//!
//! Interval tiers are validated on parse: times must be finite and
//! non-negative, intervals must have positive length, and consecutive
//! intervals must be contiguous. Boundaries that differ by no more than
//! [`CONTIGUITY_TOLERANCE_S`] are snapped to a shared value (the left
//! interval's end wins); anything larger is a hard error, because silent
//! repair of real gaps would corrupt boundary statistics downstream.

mod parse;
mod write;

pub use parse::parse;
pub use write::serialize;

use crate::diagnostics::Diagnostics;
use thiserror::Error;

/// Maximum boundary mismatch (seconds) repaired by snapping during parse.
/// Matches the rounding jitter produced by tools that serialise boundary
/// times independently per interval.
pub const CONTIGUITY_TOLERANCE_S: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum TextGridError {
    /// Missing or wrong `File type` / `Object class` declaration.
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    /// Adjacent intervals leave a gap or overlap beyond tolerance.
    #[error("tier {tier:?}: boundary {index} has a gap of {gap_s} s")]
    NonContiguousTier {
        tier: String,
        index: usize,
        gap_s: f64,
    },

    /// Input bytes could not be decoded as UTF-8, UTF-16 or Latin-1.
    #[error("encoding error: {0}")]
    Encoding(String),

    /// A number or quoted string was expected but something else was found.
    #[error("malformed value: expected {expected} {context}")]
    MalformedValue {
        expected: &'static str,
        context: String,
    },

    /// Times violate structural rules (negative, non-finite, zero-length
    /// intervals, tiers outside the grid range).
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

/// One labelled span on an interval tier. An empty label marks silence.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    /// Start time in seconds, non-negative.
    pub xmin: f64,
    /// End time in seconds, strictly greater than `xmin`.
    pub xmax: f64,
    pub text: String,
}

impl Interval {
    pub fn new(xmin: f64, xmax: f64, text: impl Into<String>) -> Self {
        Self {
            xmin,
            xmax,
            text: text.into(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.xmax - self.xmin
    }

    /// True when the trimmed label is empty, i.e. the interval is silence
    /// or an alignment gap rather than annotated material.
    pub fn is_empty_label(&self) -> bool {
        self.text.trim().is_empty()
    }
}

/// Contiguous sequence of intervals covering `[xmin, xmax]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTier {
    pub name: String,
    pub xmin: f64,
    pub xmax: f64,
    pub intervals: Vec<Interval>,
}

impl IntervalTier {
    /// Intervals with a non-empty label, in temporal order.
    pub fn labelled(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(|iv| !iv.is_empty_label())
    }
}

/// One time-stamped mark on a point tier.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub time: f64,
    pub mark: String,
}

/// Point tier ("TextTier"). Parsed for completeness; evaluation operates
/// on interval tiers only.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTier {
    pub name: String,
    pub xmin: f64,
    pub xmax: f64,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tier {
    Interval(IntervalTier),
    Point(PointTier),
}

impl Tier {
    pub fn name(&self) -> &str {
        match self {
            Tier::Interval(t) => &t.name,
            Tier::Point(t) => &t.name,
        }
    }
}

/// An annotated recording: a time range plus an ordered list of tiers.
#[derive(Debug, Clone, PartialEq)]
pub struct TextGrid {
    pub xmin: f64,
    pub xmax: f64,
    pub tiers: Vec<Tier>,
}

impl TextGrid {
    /// First interval tier with the given name, ignoring point tiers.
    pub fn interval_tier(&self, name: &str) -> Option<&IntervalTier> {
        self.tiers.iter().find_map(|t| match t {
            Tier::Interval(it) if it.name == name => Some(it),
            _ => None,
        })
    }

    /// Like [`interval_tier`](Self::interval_tier) but reports lookup
    /// anomalies: duplicate tier names (first match wins) and requests that
    /// resolve to a point tier, which evaluation cannot use.
    pub fn interval_tier_checked(
        &self,
        name: &str,
        context: &str,
        diags: &mut Diagnostics,
    ) -> Option<&IntervalTier> {
        let matches: Vec<&Tier> = self.tiers.iter().filter(|t| t.name() == name).collect();
        if matches.len() > 1 {
            diags.warn(
                context,
                format!(
                    "{} tiers named {name:?}; using the first interval tier",
                    matches.len()
                ),
            );
        }
        let found = self.interval_tier(name);
        if found.is_none() && matches.iter().any(|t| matches!(t, Tier::Point(_))) {
            diags.warn(
                context,
                format!("tier {name:?} is a point tier, unsupported for evaluation"),
            );
        }
        found
    }
}
