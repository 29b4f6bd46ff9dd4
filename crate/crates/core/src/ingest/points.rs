use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::Label;
use crate::error::{Error, Result};

/// One row of a scatter or embedding CSV: `x,y,label,subject_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: f64,
    pub y: f64,
    pub label: Label,
    pub subject_id: String,
}

pub fn write_points_csv(points: &[LabeledPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let err = |e: csv::Error| Error::MalformedCsv { path: path.to_path_buf(), reason: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for p in points {
        w.serialize(p).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn parse_points_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledPoint>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<LabeledPoint>().enumerate() {
        let p =
            rec.map_err(|e| Error::MalformedCsv { path: path.to_path_buf(), reason: format!("row {}: {e}", i + 2) })?;
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::MalformedCsv {
                path: path.to_path_buf(),
                reason: format!("row {}: non-finite coordinate", i + 2),
            });
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pts.csv");
        let pts = vec![
            LabeledPoint { x: 0.1 + 0.2, y: -1e-300, label: Label::Hc, subject_id: "s1".into() },
            LabeledPoint { x: 12345.678901234567, y: 2.0 / 3.0, label: Label::Ad, subject_id: "s,2".into() },
        ];
        write_points_csv(&pts, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x,y,label,subject_id\n"));
        assert_eq!(parse_points_csv(&p).unwrap(), pts);
        std::fs::write(&p, "x,y,label,subject_id\n1,2,MCI,a\n").unwrap();
        assert!(matches!(parse_points_csv(&p), Err(Error::MalformedCsv { .. })));
    }
}
