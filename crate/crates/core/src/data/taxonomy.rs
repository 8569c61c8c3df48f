use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const DEFAULT_TAXONOMY: &str = include_str!("../../data/taxonomy.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: String,
    pub name: String,
}

/// Activity categories in canonical index order plus the raw-item mapping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub version: u32,
    pub categories: Vec<Category>,
    pub items: BTreeMap<String, String>,
}

impl Taxonomy {
    /// The 15-category stand-in taxonomy shipped with the crate.
    pub fn builtin() -> Self {
        Taxonomy::from_json_str(DEFAULT_TAXONOMY, "builtin taxonomy")
            .expect("builtin taxonomy is valid")
    }

    pub fn from_json_str(text: &str, file: &str) -> Result<Self> {
        let taxonomy: Taxonomy = serde_json::from_str(text).map_err(|e| Error::Parse {
            file: file.to_string(),
            line: e.line() as u64,
            column: e.column() as u64,
            message: e.to_string(),
        })?;
        taxonomy.validate(file)?;
        Ok(taxonomy)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Taxonomy::from_json_str(&text, &path.display().to_string())
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("taxonomy serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_pretty())?;
        Ok(())
    }

    pub fn validate(&self, file: &str) -> Result<()> {
        let mismatch = |message: String| Error::SchemaMismatch {
            file: file.to_string(),
            message,
        };
        if self.categories.is_empty() {
            return Err(mismatch("no categories".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.categories {
            if c.id.trim().is_empty() {
                return Err(mismatch("empty category id".into()));
            }
            if !seen.insert(c.id.as_str()) {
                return Err(mismatch(format!("duplicate category id {:?}", c.id)));
            }
        }
        for (item, id) in &self.items {
            if item.trim().is_empty() {
                return Err(mismatch("empty raw item".into()));
            }
            if !seen.contains(id.as_str()) {
                return Err(mismatch(format!("item {item:?} maps to unknown category {id:?}")));
            }
        }
        Ok(())
    }

    /// Number of categories.
    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.id.as_str()).collect()
    }

    /// Raw items mapped to category `index`, in sorted order.
    pub fn items_for(&self, index: usize) -> Vec<&str> {
        let id = &self.categories[index].id;
        self.items
            .iter()
            .filter(|(_, c)| *c == id)
            .map(|(item, _)| item.as_str())
            .collect()
    }

    /// Case- and whitespace-insensitive raw item lookup.
    pub fn lookup(&self) -> ItemLookup {
        let index: HashMap<&str, usize> = self
            .categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.as_str(), i))
            .collect();
        ItemLookup {
            map: self
                .items
                .iter()
                .map(|(item, id)| (normalize_item(item), index[id.as_str()]))
                .collect(),
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("taxonomy serializes")))
    }
}

pub struct ItemLookup {
    map: HashMap<String, usize>,
}

impl ItemLookup {
    pub fn category(&self, raw: &str) -> Option<usize> {
        self.map.get(&normalize_item(raw)).copied()
    }
}

fn normalize_item(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_fifteen_categories_with_items() {
        let t = Taxonomy::builtin();
        assert_eq!(t.len(), 15);
        for i in 0..t.len() {
            assert!(!t.items_for(i).is_empty());
        }
        let lookup = t.lookup();
        assert_eq!(lookup.category("Watching  tv"), t.index_of("watching_tv"));
        assert_eq!(lookup.category("reading a book"), t.index_of("reading"));
        assert_eq!(lookup.category("juggling"), None);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        let dup = r#"{"version":1,"categories":[{"id":"a","name":"A"},{"id":"a","name":"B"}],"items":{}}"#;
        assert!(matches!(Taxonomy::from_json_str(dup, "t"), Err(Error::SchemaMismatch { .. })));
        let dangling = r#"{"version":1,"categories":[{"id":"a","name":"A"}],"items":{"x":"b"}}"#;
        assert!(matches!(Taxonomy::from_json_str(dangling, "t"), Err(Error::SchemaMismatch { .. })));
        let broken = "{\"version\":1,\n\"categories\": [";
        match Taxonomy::from_json_str(broken, "t") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
