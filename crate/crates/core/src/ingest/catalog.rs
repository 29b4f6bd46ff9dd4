use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of DMN regions in the default catalog.
pub const CATALOG_SIZE: usize = 34;

/// DMN regions identified by name in the source study. The remaining slots of
/// the default catalog are numbered placeholders.
pub const NAMED_DMN_ROIS: [&str; 18] = [
    "Ventromedial Prefrontal Cortex (vmPFC) 1",
    "Ventromedial Prefrontal Cortex (vmPFC) 7",
    "Anterior Prefrontal Cortex (aPFC) 5",
    "Medial Prefrontal Cortex (mPFC) 4",
    "Inferior Temporal Cortex 72",
    "Inferior Temporal Cortex 91",
    "Occipital Cortex 136",
    "Post Cingulate Cortex 73",
    "Post Cingulate Cortex 90",
    "Post Cingulate Cortex 93",
    "Post Cingulate Cortex 108",
    "Post Cingulate Cortex 111",
    "Post Cingulate Cortex 115",
    "Precuneus Cortex 85",
    "Precuneus Cortex 94",
    "Precuneus Cortex 112",
    "Intraparietal Sulcus (IPS) 134",
    "Fusiform Gyrus 84",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiEntry {
    pub name: String,
    pub pair: Option<String>,
}

/// Ordered ROI names with symmetric hemispheric pairings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiCatalog {
    entries: Vec<RoiEntry>,
}

impl RoiCatalog {
    pub fn new(entries: Vec<RoiEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.name.as_str(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate ROI {:?} in catalog", e.name)));
            }
        }
        for e in &entries {
            if let Some(p) = &e.pair {
                let back = index.get(p.as_str()).and_then(|&j| entries[j].pair.as_deref());
                if p == &e.name || back != Some(e.name.as_str()) {
                    return Err(Error::AsymmetricPairing(e.name.clone()));
                }
            }
        }
        Ok(Self { entries })
    }

    /// The named DMN regions padded with placeholders to 34, with
    /// vmPFC 7 paired to vmPFC 1.
    pub fn default_dmn() -> Self {
        let mut entries: Vec<RoiEntry> =
            NAMED_DMN_ROIS.iter().map(|n| RoiEntry { name: n.to_string(), pair: None }).collect();
        entries[0].pair = Some(NAMED_DMN_ROIS[1].to_string());
        entries[1].pair = Some(NAMED_DMN_ROIS[0].to_string());
        for i in NAMED_DMN_ROIS.len()..CATALOG_SIZE {
            entries.push(RoiEntry { name: format!("DMN ROI {}", i + 1), pair: None });
        }
        Self::new(entries).expect("default catalog is consistent")
    }

    /// Reads `roi_name,paired_roi_name` rows; an empty second cell means
    /// unpaired.
    pub fn parse_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let malformed = |reason: String| Error::MalformedCsv { path: path.to_path_buf(), reason };
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file);
        let header = reader.headers().map_err(|e| malformed(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["roi_name", "paired_roi_name"] {
            return Err(malformed("row 1: expected header roi_name,paired_roi_name".into()));
        }
        let mut entries = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| malformed(format!("row {}: {e}", i + 2)))?;
            let name = rec.get(0).unwrap_or("").to_string();
            if name.is_empty() || rec.len() > 2 {
                return Err(malformed(format!("row {}: expected roi_name[,paired_roi_name]", i + 2)));
            }
            let pair = rec.get(1).filter(|p| !p.is_empty()).map(str::to_string);
            entries.push(RoiEntry { name, pair });
        }
        if entries.is_empty() {
            return Err(Error::EmptyTable { path: path.to_path_buf() });
        }
        Self::new(entries)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e: csv::Error| Error::MalformedCsv { path: path.to_path_buf(), reason: e.to_string() };
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["roi_name", "paired_roi_name"]).map_err(io)?;
        for e in &self.entries {
            w.write_record([e.name.as_str(), e.pair.as_deref().unwrap_or("")]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn entries(&self) -> &[RoiEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pair_of(&self, name: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.name == name).and_then(|e| e.pair.as_deref())
    }

    /// Each pair once, first member in catalog order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let pos: HashMap<&str, usize> = self.entries.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                let p = e.pair.as_deref()?;
                (pos[p] > i).then(|| (e.name.clone(), p.to_string()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog() {
        let c = RoiCatalog::default_dmn();
        assert_eq!(c.len(), CATALOG_SIZE);
        assert_eq!(
            c.pair_of("Ventromedial Prefrontal Cortex (vmPFC) 7"),
            Some("Ventromedial Prefrontal Cortex (vmPFC) 1")
        );
        assert_eq!(c.pairs().len(), 1);
        assert!(c.names().contains(&"Post Cingulate Cortex 111".to_string()));
    }

    #[test]
    fn one_sided_pair_is_rejected() {
        let entries =
            vec![RoiEntry { name: "L".into(), pair: Some("R".into()) }, RoiEntry { name: "R".into(), pair: None }];
        assert!(matches!(RoiCatalog::new(entries), Err(Error::AsymmetricPairing(n)) if n == "L"));
        let selfish = vec![RoiEntry { name: "A".into(), pair: Some("A".into()) }];
        assert!(matches!(RoiCatalog::new(selfish), Err(Error::AsymmetricPairing(_))));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cat.csv");
        let c = RoiCatalog::default_dmn();
        c.write_csv(&p).unwrap();
        assert_eq!(RoiCatalog::parse_csv(&p).unwrap(), c);
        std::fs::write(&p, "roi_name,paired_roi_name\nA,B\nB,\n").unwrap();
        assert!(matches!(RoiCatalog::parse_csv(&p), Err(Error::AsymmetricPairing(_))));
    }
}
