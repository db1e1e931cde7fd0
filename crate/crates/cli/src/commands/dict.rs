//! `aligneval dict`: collect one wordlist from every word tier in the
//! corpus (after transcript cleaning), convert it with the configured g2p
//! rules, and write the pronunciation dictionary plus a diagnostics file
//! for anything that did not map.

use std::collections::BTreeSet;

use aligneval_core::diagnostics::Diagnostics;
use aligneval_core::g2p::PronunciationDictionary;
use aligneval_core::corpus::clean_transcript;

use crate::config::RunConfig;
use crate::output;
use crate::CliError;

pub fn run(config: &RunConfig, strict: bool) -> Result<(), CliError> {
    let Some(rules) = &config.g2p else {
        return Err(CliError::Config(vec![
            "dict requires \"g2p_rules\" in the run configuration".into(),
        ]));
    };

    let mut diags = Diagnostics::new();
    let mut words: BTreeSet<String> = BTreeSet::new();
    for entry in &config.entries {
        let Some(grid) = super::load_grid(&entry.path_textgrid, &mut diags) else {
            continue;
        };
        let ctx = entry.path_textgrid.display().to_string();
        let Some(tier) = grid.interval_tier_checked(&config.words_tier, &ctx, &mut diags) else {
            diags.warn(&ctx, format!("no interval tier named {:?}", config.words_tier));
            continue;
        };
        for interval in tier.labelled() {
            // Cleaning can split a label into several tokens or into none.
            for token in clean_transcript(&interval.text, &config.cleaning).split_whitespace() {
                if config.case_fold {
                    words.insert(token.to_lowercase());
                } else {
                    words.insert(token.to_string());
                }
            }
        }
    }
    if words.is_empty() {
        diags.warn(
            config.manifest_path.display().to_string(),
            "corpus yielded an empty wordlist; writing an empty dictionary",
        );
    }

    let dictionary =
        PronunciationDictionary::build(words.iter().map(|w| w.as_str()), rules, &mut diags);
    println!(
        "dictionary: {} word(s) from {} manifest file(s), rules for {}",
        dictionary.entries.len(),
        config.entries.len(),
        rules.language
    );
    output::write_atomic(
        &config.out_dir.join("dictionary.dict"),
        dictionary.serialize().as_bytes(),
    )?;
    output::report_diagnostics(&diags, &config.out_dir.join("dict_diagnostics.txt"))?;
    output::outcome(&diags, strict)
}
