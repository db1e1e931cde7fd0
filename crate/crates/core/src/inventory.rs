//! Phone inventories and natural-class grouping.
//!
//! Each language gets a [`PhoneInventory`]; a [`NaturalClassMap`] partitions
//! the union of inventories into articulatory classes so boundary statistics
//! can be aggregated by class rather than by individual phone.
//! [`coverage_report`] answers the transfer question: which phones of a
//! held-out language no training language supplies.
//!
//! The toolkit ships illustrative inventories for six languages as editable
//! fixtures (see `data/inventories/`); they are test scaffolding, not
//! published analyses.

use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InventoryError {
    /// A phone has no class in the map.
    #[error("unknown phone {0:?}")]
    UnknownPhone(String),

    /// Inventory file violates its own contract (bad JSON, counterparts
    /// referencing phones that are not listed).
    #[error("invalid inventory: {0}")]
    InvalidInventory(String),

    /// A phone is listed under more than one class; the map must be a
    /// partition.
    #[error("class map is not a partition: {phone:?} is in {first:?} and {second:?}")]
    OverlappingClasses {
        phone: String,
        first: String,
        second: String,
    },

    /// Class map file is unusable.
    #[error("invalid class map: {0}")]
    InvalidClassMap(String),
}

/// The phones of one language, plus the short-to-long vowel pairing where
/// the language contrasts length (long vowels are separate symbols).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneInventory {
    pub language: String,
    pub phones: BTreeSet<String>,
    pub long_counterparts: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct RawInventory {
    language: String,
    phones: Vec<String>,
    #[serde(default)]
    long_counterparts: BTreeMap<String, String>,
}

impl PhoneInventory {
    pub fn from_json(json: &str) -> Result<Self, InventoryError> {
        let raw: RawInventory = serde_json::from_str(json)
            .map_err(|e| InventoryError::InvalidInventory(e.to_string()))?;
        if raw.language.trim().is_empty() {
            return Err(InventoryError::InvalidInventory(
                "language tag is empty".into(),
            ));
        }
        let mut phones = BTreeSet::new();
        for p in &raw.phones {
            if p.is_empty() {
                return Err(InventoryError::InvalidInventory(
                    "empty phone symbol".into(),
                ));
            }
            if !phones.insert(p.clone()) {
                return Err(InventoryError::InvalidInventory(format!(
                    "phone {p:?} listed twice"
                )));
            }
        }
        for (base, long) in &raw.long_counterparts {
            if !phones.contains(base) {
                return Err(InventoryError::InvalidInventory(format!(
                    "long counterpart base {base:?} is not in the inventory"
                )));
            }
            if !phones.contains(long) {
                return Err(InventoryError::InvalidInventory(format!(
                    "long counterpart {long:?} is not in the inventory"
                )));
            }
        }
        Ok(Self {
            language: raw.language,
            phones,
            long_counterparts: raw.long_counterparts,
        })
    }
}

/// Disjoint grouping of phones into articulatory classes, in declaration
/// order (the order figures list rows in).
#[derive(Debug, Clone)]
pub struct NaturalClassMap {
    classes: Vec<(String, BTreeSet<String>)>,
    lookup: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct RawClassEntry {
    class: String,
    phones: Vec<String>,
}

#[derive(Deserialize)]
struct RawClassMap {
    classes: Vec<RawClassEntry>,
}

impl NaturalClassMap {
    pub fn from_json(json: &str) -> Result<Self, InventoryError> {
        let raw: RawClassMap = serde_json::from_str(json)
            .map_err(|e| InventoryError::InvalidClassMap(e.to_string()))?;
        let mut classes: Vec<(String, BTreeSet<String>)> = Vec::with_capacity(raw.classes.len());
        let mut lookup: HashMap<String, usize> = HashMap::new();
        for (idx, entry) in raw.classes.into_iter().enumerate() {
            if entry.class.trim().is_empty() {
                return Err(InventoryError::InvalidClassMap("empty class label".into()));
            }
            if classes
                .iter()
                .any(|(label, _)| *label == entry.class)
            {
                return Err(InventoryError::InvalidClassMap(format!(
                    "class {:?} declared twice",
                    entry.class
                )));
            }
            let mut phones = BTreeSet::new();
            for p in entry.phones {
                if let Some(&prev) = lookup.get(&p) {
                    return Err(InventoryError::OverlappingClasses {
                        phone: p,
                        first: classes[prev].0.clone(),
                        second: entry.class,
                    });
                }
                lookup.insert(p.clone(), idx);
                phones.insert(p);
            }
            classes.push((entry.class, phones));
        }
        Ok(Self { classes, lookup })
    }

    /// The class map shipped with the toolkit, covering the union of the
    /// bundled inventories.
    pub fn defaults() -> Self {
        Self::from_json(include_str!("../data/class_map.json"))
            .expect("embedded class map is valid")
    }

    /// Class label for a phone.
    pub fn classify(&self, phone: &str) -> Result<&str, InventoryError> {
        self.lookup
            .get(phone)
            .map(|&idx| self.classes[idx].0.as_str())
            .ok_or_else(|| InventoryError::UnknownPhone(phone.to_string()))
    }

    /// Declaration-order index of the phone's class, for sorting grouped
    /// output by class.
    pub fn class_index(&self, phone: &str) -> Result<usize, InventoryError> {
        self.lookup
            .get(phone)
            .copied()
            .ok_or_else(|| InventoryError::UnknownPhone(phone.to_string()))
    }

    pub fn class_label_at(&self, index: usize) -> Option<&str> {
        self.classes.get(index).map(|(label, _)| label.as_str())
    }

    /// Class labels in declaration order.
    pub fn class_labels(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().map(|(label, _)| label.as_str())
    }

    pub fn phones_in(&self, class: &str) -> Option<&BTreeSet<String>> {
        self.classes
            .iter()
            .find(|(label, _)| label == class)
            .map(|(_, phones)| phones)
    }

    /// Union of the phones in the named classes; unknown class names are
    /// simply absent from the union.
    pub fn phones_in_classes(&self, names: &[&str]) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for name in names {
            if let Some(phones) = self.phones_in(name) {
                out.extend(phones.iter().cloned());
            }
        }
        out
    }

    /// Inventory phones the map does not classify. Empty means the map
    /// fully covers the inventory.
    pub fn unclassified(&self, inventory: &PhoneInventory) -> Vec<String> {
        inventory
            .phones
            .iter()
            .filter(|p| !self.lookup.contains_key(*p))
            .cloned()
            .collect()
    }
}

/// How well a set of training languages covers a held-out test language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub test_language: String,
    pub train_languages: Vec<String>,
    /// Test phones absent from every training inventory.
    pub missing: BTreeSet<String>,
    /// Per test phone: presence in each training language, in
    /// `train_languages` order.
    pub presence: BTreeMap<String, Vec<bool>>,
}

/// Compare a test inventory against the union of training inventories.
pub fn coverage_report(test: &PhoneInventory, train: &[&PhoneInventory]) -> CoverageReport {
    let train_languages: Vec<String> = train.iter().map(|t| t.language.clone()).collect();
    let mut presence = BTreeMap::new();
    let mut missing = BTreeSet::new();
    for phone in &test.phones {
        let row: Vec<bool> = train.iter().map(|t| t.phones.contains(phone)).collect();
        if !row.iter().any(|&p| p) {
            missing.insert(phone.clone());
        }
        presence.insert(phone.clone(), row);
    }
    CoverageReport {
        test_language: test.language.clone(),
        train_languages,
        missing,
        presence,
    }
}

/// The six inventories bundled as editable fixtures, in alphabetical
/// order of language name.
pub fn bundled_inventories() -> Vec<PhoneInventory> {
    [
        include_str!("../data/inventories/bardi.json"),
        include_str!("../data/inventories/gija.json"),
        include_str!("../data/inventories/kunbarlang.json"),
        include_str!("../data/inventories/ngaanyatjarra.json"),
        include_str!("../data/inventories/yannhangu.json"),
        include_str!("../data/inventories/yidiny.json"),
    ]
    .iter()
    .map(|json| PhoneInventory::from_json(json).expect("bundled inventory is valid"))
    .collect()
}
