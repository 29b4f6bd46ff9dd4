use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cohort label. `Hc` is the negative class (0), `Ad` the positive one (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "HC")]
    Hc,
    #[serde(rename = "AD")]
    Ad,
}

impl Label {
    pub fn as_class(self) -> u8 {
        match self {
            Label::Hc => 0,
            Label::Ad => 1,
        }
    }

    pub fn from_class(c: u8) -> Option<Self> {
        match c {
            0 => Some(Label::Hc),
            1 => Some(Label::Ad),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Hc => "HC",
            Label::Ad => "AD",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "HC" => Ok(Label::Hc),
            "AD" => Ok(Label::Ad),
            other => Err(Error::UnknownLabel { label: other.to_string() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub label: Label,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CohortManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }
}

/// Reads `subject_id,label,path` rows. Relative paths are resolved against the
/// manifest's own directory and must exist.
pub fn parse_manifest(path: impl AsRef<Path>) -> Result<CohortManifest> {
    let path = path.as_ref();
    let malformed = |reason: String| Error::MalformedCsv { path: path.to_path_buf(), reason };
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file);
    let header = reader.headers().map_err(|e| malformed(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["subject_id", "label", "path"] {
        return Err(malformed(format!("row 1: expected header subject_id,label,path, got {:?}", header)));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| malformed(format!("row {row}: {e}")))?;
        if rec.len() != 3 {
            return Err(malformed(format!("row {row}: expected 3 cells, got {}", rec.len())));
        }
        let subject_id = rec[0].to_string();
        if subject_id.is_empty() {
            return Err(malformed(format!("row {row}: empty subject_id")));
        }
        let label: Label = rec[1].parse()?;
        if !seen.insert(subject_id.clone()) {
            return Err(Error::DuplicateSubject(subject_id));
        }
        let file = base.join(&rec[2]);
        if !file.is_file() {
            return Err(Error::MissingFile(file));
        }
        entries.push(ManifestEntry { subject_id, label, path: file });
    }
    if entries.is_empty() {
        return Err(Error::EmptyTable { path: path.to_path_buf() });
    }
    Ok(CohortManifest { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fmt::Write as _;

    fn setup(rows: &[(&str, &str, &str)], touch: &[&str]) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        for f in touch {
            std::fs::write(dir.path().join(f), "a\n1\n").unwrap();
        }
        let mut body = String::from("subject_id,label,path\n");
        for (s, l, p) in rows {
            writeln!(body, "{s},{l},{p}").unwrap();
        }
        let m = dir.path().join("manifest.csv");
        std::fs::write(&m, body).unwrap();
        (dir, m)
    }

    #[test]
    fn hundred_subjects() {
        let names: Vec<String> = (0..100).map(|i| format!("s{i:03}.csv")).collect();
        let ids: Vec<String> = (0..100).map(|i| format!("s{i:03}")).collect();
        let rows: Vec<_> =
            (0..100).map(|i| (ids[i].as_str(), if i < 50 { "HC" } else { "AD" }, names[i].as_str())).collect();
        let touch: Vec<&str> = names.iter().map(String::as_str).collect();
        let (_dir, m) = setup(&rows, &touch);
        let manifest = parse_manifest(&m).unwrap();
        assert_eq!(manifest.len(), 100);
        assert_eq!(manifest.count(Label::Hc), 50);
        assert_eq!(manifest.count(Label::Ad), 50);
        assert!(manifest.entries[0].path.is_absolute() || manifest.entries[0].path.exists());
    }

    #[test]
    fn guards() {
        let (_d, m) = setup(&[("a", "MCI", "a.csv")], &["a.csv"]);
        assert!(matches!(parse_manifest(&m), Err(Error::UnknownLabel { label }) if label == "MCI"));
        let (_d, m) = setup(&[("a", "HC", "a.csv"), ("a", "AD", "a.csv")], &["a.csv"]);
        assert!(matches!(parse_manifest(&m), Err(Error::DuplicateSubject(s)) if s == "a"));
        let (_d, m) = setup(&[("a", "HC", "gone.csv")], &[]);
        assert!(matches!(parse_manifest(&m), Err(Error::MissingFile(_))));
        let (_d, m) = setup(&[], &[]);
        assert!(matches!(parse_manifest(&m), Err(Error::EmptyTable { .. })));
    }

    #[test]
    fn label_codes() {
        assert_eq!(Label::Hc.as_class(), 0);
        assert_eq!(Label::Ad.as_class(), 1);
        assert_eq!(Label::from_class(1), Some(Label::Ad));
        assert_eq!("HC".parse::<Label>().unwrap(), Label::Hc);
        assert!("hc".parse::<Label>().is_err());
        assert_eq!(serde_json::to_string(&Label::Ad).unwrap(), "\"AD\"");
    }
}
