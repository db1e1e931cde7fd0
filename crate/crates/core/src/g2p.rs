//! Rule-based grapheme-to-phoneme conversion and pronunciation dictionaries.
//!
//! A [`G2pRuleSet`] is an ordered table of grapheme → phone-sequence rules.
//! Application scans a word left to right; at each position the longest
//! matching grapheme wins (ties broken by declaration order), consumes its
//! characters, and emits its phones. Characters no rule matches are skipped
//! and reported, never fatal: archival transcripts contain stray punctuation
//! and the rest of the word is still useful.
//!
//! The toolkit ships illustrative rule tables for six languages as editable
//! fixtures (see `data/g2p/`).

use crate::diagnostics::Diagnostics;
use crate::inventory::PhoneInventory;
use crate::textgrid::IntervalTier;
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum G2pError {
    #[error("duplicate grapheme rule {0:?}")]
    DuplicateGrapheme(String),

    #[error("invalid rule set: {0}")]
    InvalidRules(String),

    #[error("malformed dictionary line {line}: {message}")]
    MalformedDictionary { line: usize, message: String },
}

/// One orthography's replacement table, pre-sorted for greedy matching.
#[derive(Debug, Clone)]
pub struct G2pRuleSet {
    pub language: String,
    /// Rules sorted by grapheme length (chars) descending, declaration
    /// order within a length.
    rules: Vec<(String, Vec<String>)>,
}

#[derive(Deserialize)]
struct RawRule {
    grapheme: String,
    phones: Vec<String>,
}

#[derive(Deserialize)]
struct RawRuleSet {
    language: String,
    rules: Vec<RawRule>,
}

/// Result of applying a rule set to one word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct G2pOutcome {
    pub phones: Vec<String>,
    /// Graphemes consumed, as (char index, grapheme) in scan order.
    pub segments: Vec<(usize, String)>,
    /// Characters no rule matched, as (char index, char).
    pub unmapped: Vec<(usize, char)>,
}

impl G2pRuleSet {
    pub fn new(
        language: impl Into<String>,
        rules: Vec<(String, Vec<String>)>,
    ) -> Result<Self, G2pError> {
        let language = language.into();
        if language.trim().is_empty() {
            return Err(G2pError::InvalidRules("language tag is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for (grapheme, _) in &rules {
            if grapheme.is_empty() {
                return Err(G2pError::InvalidRules("empty grapheme".into()));
            }
            if !seen.insert(grapheme.clone()) {
                return Err(G2pError::DuplicateGrapheme(grapheme.clone()));
            }
        }
        let mut sorted = rules;
        // Stable sort keeps declaration order within a length.
        sorted.sort_by_key(|(g, _)| std::cmp::Reverse(g.chars().count()));
        Ok(Self {
            language,
            rules: sorted,
        })
    }

    pub fn from_json(json: &str) -> Result<Self, G2pError> {
        let raw: RawRuleSet =
            serde_json::from_str(json).map_err(|e| G2pError::InvalidRules(e.to_string()))?;
        Self::new(
            raw.language,
            raw.rules
                .into_iter()
                .map(|r| (r.grapheme, r.phones))
                .collect(),
        )
    }

    pub fn rules(&self) -> &[(String, Vec<String>)] {
        &self.rules
    }

    /// Greedy longest-first conversion. Total: every input yields an
    /// outcome, with skipped characters listed in `unmapped`.
    pub fn apply(&self, word: &str) -> G2pOutcome {
        let mut out = G2pOutcome::default();
        let mut rest = word;
        let mut char_pos = 0usize;
        while !rest.is_empty() {
            // Rules are sorted longest-first, so the first hit is the match.
            match self.rules.iter().find(|(g, _)| rest.starts_with(g.as_str())) {
                Some((grapheme, phones)) => {
                    out.phones.extend(phones.iter().cloned());
                    out.segments.push((char_pos, grapheme.clone()));
                    char_pos += grapheme.chars().count();
                    rest = &rest[grapheme.len()..];
                }
                None => {
                    let c = rest.chars().next().expect("rest is non-empty");
                    out.unmapped.push((char_pos, c));
                    char_pos += 1;
                    rest = &rest[c.len_utf8()..];
                }
            }
        }
        out
    }
}

/// Collect the unique non-empty labels of word tiers into a sorted wordlist.
pub fn build_wordlist<'a, I>(tiers: I, case_fold: bool) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a IntervalTier>,
{
    let mut words = BTreeSet::new();
    for tier in tiers {
        for interval in tier.labelled() {
            let label = interval.text.trim();
            if case_fold {
                words.insert(label.to_lowercase());
            } else {
                words.insert(label.to_string());
            }
        }
    }
    words
}

/// Word → one phone sequence. Entries are kept sorted by word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PronunciationDictionary {
    pub entries: BTreeMap<String, Vec<String>>,
}

impl PronunciationDictionary {
    /// Convert a wordlist. Unmapped characters are reported per word; a
    /// word whose conversion yields no phones at all is omitted (an empty
    /// pronunciation line would be rejected downstream) and reported as an
    /// error.
    pub fn build<'a, I>(words: I, rules: &G2pRuleSet, diagnostics: &mut Diagnostics) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut entries = BTreeMap::new();
        for word in words {
            let outcome = rules.apply(word);
            for (pos, c) in &outcome.unmapped {
                diagnostics.warn(
                    format!("word {word:?}"),
                    format!("unmapped grapheme {c:?} at char {pos}"),
                );
            }
            if outcome.phones.is_empty() {
                diagnostics.error(
                    format!("word {word:?}"),
                    "no mappable graphemes, omitted from dictionary",
                );
                continue;
            }
            entries.insert(word.to_string(), outcome.phones);
        }
        Self { entries }
    }

    /// Report every (word, phone) pair whose phone is outside the
    /// inventory. Empty means the dictionary is fully covered.
    pub fn validate_against(&self, inventory: &PhoneInventory) -> Vec<(String, String)> {
        let mut violations = Vec::new();
        for (word, phones) in &self.entries {
            for phone in phones {
                if !inventory.phones.contains(phone) {
                    violations.push((word.clone(), phone.clone()));
                }
            }
        }
        violations
    }

    /// One `word<TAB>phone phone ...` line per entry, words sorted.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (word, phones) in &self.entries {
            out.push_str(word);
            out.push('\t');
            out.push_str(&phones.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, G2pError> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (word, rest) = line.split_once('\t').ok_or(G2pError::MalformedDictionary {
                line: line_no,
                message: "missing tab separator".into(),
            })?;
            let phones: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if word.is_empty() || phones.is_empty() {
                return Err(G2pError::MalformedDictionary {
                    line: line_no,
                    message: "empty word or pronunciation".into(),
                });
            }
            if entries.insert(word.to_string(), phones).is_some() {
                return Err(G2pError::MalformedDictionary {
                    line: line_no,
                    message: format!("duplicate entry for {word:?}"),
                });
            }
        }
        Ok(Self { entries })
    }
}

/// The six rule tables bundled as editable fixtures, in alphabetical order
/// of language name.
pub fn bundled_rule_sets() -> Vec<G2pRuleSet> {
    [
        include_str!("../data/g2p/bardi.json"),
        include_str!("../data/g2p/gija.json"),
        include_str!("../data/g2p/kunbarlang.json"),
        include_str!("../data/g2p/ngaanyatjarra.json"),
        include_str!("../data/g2p/yannhangu.json"),
        include_str!("../data/g2p/yidiny.json"),
    ]
    .iter()
    .map(|json| G2pRuleSet::from_json(json).expect("bundled rule set is valid"))
    .collect()
}
