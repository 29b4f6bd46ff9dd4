use std::fs::{self, File};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use stochds::ingest::Label;
use stochds::mlharness::{FeatureMatrix, LabelVector};

use crate::config::RunConfig;
use crate::CliError;

pub const FORMAT_VERSION: &str = "stochds-artifact/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope shared by every JSON output: format and tool version, the kind
/// of payload, and the full effective configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub format_version: String,
    pub version: String,
    pub artifact: String,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Artifact<T> {
    pub fn new(artifact: &str, config: &RunConfig, body: T) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            version: VERSION.into(),
            artifact: artifact.into(),
            config: config.clone(),
            body,
        }
    }
}

fn write_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifacts serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json(value)).map_err(|e| write_err(path, e))
}

pub fn read_artifact<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Artifact<T>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let probe: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Runtime(format!("{} is not JSON: {e}", path.display())))?;
    let found = probe.get("artifact").and_then(|v| v.as_str()).unwrap_or("");
    if found != kind {
        return Err(CliError::Usage(format!("{} holds a {found:?} artifact, expected {kind:?}", path.display())));
    }
    serde_json::from_value(probe).map_err(|e| CliError::Runtime(format!("cannot decode {}: {e}", path.display())))
}

/// Writes `subject_id,label,<features...>`.
pub fn write_features(path: &Path, x: &FeatureMatrix, y: &LabelVector) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| write_err(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["subject_id".to_string(), "label".to_string()];
    header.extend(x.feature_names().iter().cloned());
    w.write_record(&header).map_err(|e| write_err(path, e))?;
    for (i, id) in x.subject_ids().iter().enumerate() {
        let label = Label::from_class(y.as_slice()[i]).expect("labels are 0/1");
        let mut rec = vec![id.clone(), label.to_string()];
        rec.extend(x.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

pub fn read_features(path: &Path) -> Result<(FeatureMatrix, LabelVector), CliError> {
    let bad = |reason: String| CliError::Runtime(format!("malformed features {}: {reason}", path.display()));
    let file = File::open(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "subject_id" || &header[1] != "label" {
        return Err(bad("header must be subject_id,label,<features...>".into()));
    }
    let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let label: Label = rec[1].parse()?;
        let row = rec
            .iter()
            .skip(2)
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
        ids.push(rec[0].to_string());
        labels.push(label);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no subjects".into()));
    }
    let x = FeatureMatrix::new(names, ids, rows)?;
    Ok((x, LabelVector::from_labels(&labels)))
}
