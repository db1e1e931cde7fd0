//! Run configuration: JSON config file, flag overrides, manifest loading,
//! and the fail-fast validation pass that turns every bad reference into
//! one consolidated error list instead of a cascade of mid-run surprises.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use aligneval_core::corpus::{CleaningRules, ManifestEntry};
use aligneval_core::g2p::G2pRuleSet;
use aligneval_core::inventory::NaturalClassMap;
use aligneval_core::vowel::FormantConfig;
use serde::Deserialize;

use crate::CliError;

/// The config file as written on disk. Every field is optional; defaults
/// and command-line flags fill the gaps. Relative paths are resolved
/// against the config file's own directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub manifest: Option<PathBuf>,
    pub words_tier: Option<String>,
    pub phones_tier: Option<String>,
    pub cleaning_rules: Option<PathBuf>,
    pub class_map: Option<PathBuf>,
    pub g2p_rules: Option<PathBuf>,
    pub formant_config: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub model_tag: Option<String>,
    pub setting_tag: Option<String>,
    /// Lowercase words before dictionary building.
    pub case_fold: Option<bool>,
}

/// Command-line values that override the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub manifest: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub model_tag: Option<String>,
    pub setting_tag: Option<String>,
}

/// Fully resolved, validated configuration: every referenced file has
/// been read and parsed before any subcommand runs.
#[derive(Debug)]
pub struct RunConfig {
    pub manifest_path: PathBuf,
    pub entries: Vec<ManifestEntry>,
    pub words_tier: String,
    pub phones_tier: String,
    pub cleaning: CleaningRules,
    pub class_map: NaturalClassMap,
    /// Present only when the config names a rules file; `dict` requires it.
    pub g2p: Option<G2pRuleSet>,
    pub formant: FormantConfig,
    pub out_dir: PathBuf,
    pub model_tag: String,
    pub setting_tag: String,
    pub case_fold: bool,
}

impl RunConfig {
    /// Merge the optional config file with flag overrides, then validate
    /// everything the run will depend on. All problems are collected and
    /// reported together.
    pub fn load(config_path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
        let mut errors: Vec<String> = Vec::new();
        let mut raw = RawConfig::default();
        let mut config_dir = PathBuf::from(".");
        if let Some(path) = config_path {
            match std::fs::read_to_string(path) {
                Ok(text) => match serde_json::from_str::<RawConfig>(&text) {
                    Ok(parsed) => {
                        raw = parsed;
                        if let Some(dir) = path.parent() {
                            config_dir = dir.to_path_buf();
                        }
                    }
                    Err(e) => errors.push(format!("{}: not valid config JSON: {e}", path.display())),
                },
                Err(e) => errors.push(format!("{}: cannot read config: {e}", path.display())),
            }
        }
        let resolve = |p: &PathBuf| -> PathBuf {
            if p.is_absolute() {
                p.clone()
            } else {
                config_dir.join(p)
            }
        };

        let manifest_path = overrides
            .manifest
            .clone()
            .or_else(|| raw.manifest.as_ref().map(&resolve));
        let mut entries = Vec::new();
        let mut resolved_manifest = PathBuf::new();
        match &manifest_path {
            Some(path) => match load_manifest(path) {
                Ok(list) => {
                    entries = list;
                    resolved_manifest = path.clone();
                }
                Err(e) => errors.push(e),
            },
            None => errors.push("no manifest given (use --manifest or the config file)".into()),
        }

        let cleaning = match &raw.cleaning_rules {
            Some(p) => read_and_parse(&resolve(p), "cleaning rules", &mut errors, |text| {
                CleaningRules::from_json(text).map_err(|e| e.to_string())
            })
            .unwrap_or_default(),
            None => CleaningRules::defaults(),
        };
        let class_map = match &raw.class_map {
            Some(p) => read_and_parse(&resolve(p), "class map", &mut errors, |text| {
                NaturalClassMap::from_json(text).map_err(|e| e.to_string())
            })
            .unwrap_or_else(NaturalClassMap::defaults),
            None => NaturalClassMap::defaults(),
        };
        let g2p = raw.g2p_rules.as_ref().and_then(|p| {
            read_and_parse(&resolve(p), "g2p rules", &mut errors, |text| {
                G2pRuleSet::from_json(text).map_err(|e| e.to_string())
            })
        });
        let formant = match &raw.formant_config {
            Some(p) => read_and_parse(&resolve(p), "formant config", &mut errors, |text| {
                serde_json::from_str::<FormantConfig>(text)
                    .map_err(|e| e.to_string())
                    .and_then(|cfg| cfg.validate().map(|()| cfg).map_err(|e| e.to_string()))
            })
            .unwrap_or_default(),
            None => FormantConfig::default(),
        };

        let out_dir = overrides
            .out_dir
            .clone()
            .or_else(|| raw.out_dir.as_ref().map(&resolve))
            .unwrap_or_else(|| PathBuf::from("out"));
        if let Err(e) = std::fs::create_dir_all(&out_dir) {
            errors.push(format!("{}: cannot create output directory: {e}", out_dir.display()));
        }

        if !errors.is_empty() {
            return Err(CliError::Config(errors));
        }
        Ok(RunConfig {
            manifest_path: resolved_manifest,
            entries,
            words_tier: raw.words_tier.clone().unwrap_or_else(|| "words".into()),
            phones_tier: raw.phones_tier.clone().unwrap_or_else(|| "phones".into()),
            cleaning,
            class_map,
            g2p,
            formant,
            out_dir,
            model_tag: overrides
                .model_tag
                .clone()
                .or_else(|| raw.model_tag.clone())
                .unwrap_or_else(|| "model".into()),
            setting_tag: overrides
                .setting_tag
                .clone()
                .or_else(|| raw.setting_tag.clone())
                .unwrap_or_else(|| "base".into()),
            case_fold: raw.case_fold.unwrap_or(true),
        })
    }
}

fn read_and_parse<T>(
    path: &Path,
    what: &str,
    errors: &mut Vec<String>,
    parse: impl FnOnce(&str) -> Result<T, String>,
) -> Option<T> {
    match std::fs::read_to_string(path) {
        Ok(text) => match parse(&text) {
            Ok(v) => Some(v),
            Err(e) => {
                errors.push(format!("{}: invalid {what}: {e}", path.display()));
                None
            }
        },
        Err(e) => {
            errors.push(format!("{}: cannot read {what}: {e}", path.display()));
            None
        }
    }
}

pub const MANIFEST_HEADER: [&str; 4] = ["audio", "textgrid", "language", "split"];

/// Read a manifest CSV (`audio,textgrid,language,split`). Relative file
/// paths are resolved against the manifest's directory so a fixture tree
/// can be moved wholesale.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, String> {
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| format!("{}: cannot read manifest: {e}", path.display()))?;
    let headers = reader
        .headers()
        .map_err(|e| format!("{}: bad manifest header: {e}", path.display()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
        return Err(format!(
            "{}: manifest header must be {:?}, got {:?}",
            path.display(),
            MANIFEST_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let resolve = |p: &str| -> PathBuf {
        let pb = PathBuf::from(p);
        if pb.is_absolute() {
            pb
        } else {
            base.join(pb)
        }
    };
    let mut entries = Vec::new();
    let mut seen: BTreeSet<PathBuf> = BTreeSet::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: row {}: {e}", path.display(), i + 2))?;
        if record.len() != 4 {
            return Err(format!(
                "{}: row {}: expected 4 fields, got {}",
                path.display(),
                i + 2,
                record.len()
            ));
        }
        let entry = ManifestEntry {
            path_audio: resolve(&record[0]),
            path_textgrid: resolve(&record[1]),
            language: record[2].to_string(),
            split: record[3].to_string(),
        };
        if !seen.insert(entry.path_textgrid.clone()) {
            return Err(format!(
                "{}: row {}: duplicate textgrid entry {}",
                path.display(),
                i + 2,
                entry.path_textgrid.display()
            ));
        }
        entries.push(entry);
    }
    Ok(entries)
}
