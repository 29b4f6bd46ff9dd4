use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::RealSeries;

/// One subject's ROI-by-time table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiTimeSeriesTable {
    pub subject_id: String,
    pub roi_names: Vec<String>,
    pub series: Vec<RealSeries>,
}

impl RoiTimeSeriesTable {
    pub fn new(subject_id: impl Into<String>, roi_names: Vec<String>, series: Vec<RealSeries>) -> Result<Self> {
        if roi_names.is_empty() || series.is_empty() {
            return Err(Error::EmptyInput);
        }
        if roi_names.len() != series.len() {
            return Err(Error::LengthMismatch { left: roi_names.len(), right: series.len() });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = roi_names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidParameter(format!("duplicate ROI name {dup:?}")));
        }
        let t = series[0].len();
        if let Some(s) = series.iter().find(|s| s.len() != t) {
            return Err(Error::LengthMismatch { left: t, right: s.len() });
        }
        Ok(Self { subject_id: subject_id.into(), roi_names, series })
    }

    /// Number of time points.
    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn roi_count(&self) -> usize {
        self.roi_names.len()
    }

    pub fn get(&self, roi: &str) -> Option<&RealSeries> {
        self.roi_names.iter().position(|n| n == roi).map(|i| &self.series[i])
    }
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedCsv { path: path.to_path_buf(), reason: reason.into() }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => malformed(path, format!("{other:?}")),
    }
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(file))
}

fn parse_cell(path: &Path, cell: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| malformed(path, format!("row {row}, column {col}: {cell:?} is not a number")))?;
    if !v.is_finite() {
        return Err(malformed(path, format!("row {row}, column {col}: non-finite value {cell:?}")));
    }
    Ok(v)
}

/// Reads a header of ROI names followed by one row per time point. The
/// subject id is the file stem. Row numbers in errors are 1-based and count
/// the header.
pub fn parse_roi_csv(path: impl AsRef<Path>) -> Result<RoiTimeSeriesTable> {
    let path = path.as_ref();
    let mut records = open(path)?.into_records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(Error::EmptyTable { path: path.to_path_buf() }),
    };
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if n.is_empty() {
            return Err(malformed(path, "row 1: empty ROI name"));
        }
        if !seen.insert(n.as_str()) {
            return Err(malformed(path, format!("row 1: duplicate ROI name {n:?}")));
        }
    }

    let mut columns = vec![Vec::new(); names.len()];
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != names.len() {
            return Err(malformed(path, format!("row {row}: {} cells, header has {}", rec.len(), names.len())));
        }
        for (col, (cell, column)) in rec.iter().zip(columns.iter_mut()).enumerate() {
            column.push(parse_cell(path, cell, row, col + 1)?);
        }
    }
    if columns[0].is_empty() {
        return Err(Error::EmptyTable { path: path.to_path_buf() });
    }

    let subject = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let series = columns.into_iter().map(RealSeries::new).collect::<Result<Vec<_>>>()?;
    RoiTimeSeriesTable::new(subject, names, series)
}

/// Writes the table in the layout `parse_roi_csv` reads. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_roi_csv(table: &RoiTimeSeriesTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&table.roi_names).map_err(|e| csv_error(path, e))?;
    for t in 0..table.len() {
        w.write_record(table.series.iter().map(|s| s[t].to_string())).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn three_rois_four_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "sub01.csv", "a,b,c\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n");
        let t = parse_roi_csv(&p).unwrap();
        assert_eq!(t.subject_id, "sub01");
        assert_eq!(t.roi_names, ["a", "b", "c"]);
        assert_eq!(t.len(), 4);
        assert_eq!(t.get("b").unwrap().values(), &vec![2.0, 5.0, 8.0, 11.0]);
    }

    #[test]
    fn ragged_row_names_its_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "s.csv", "a,b\n1,2\n3\n");
        match parse_roi_csv(&p) {
            Err(Error::MalformedCsv { reason, .. }) => assert!(reason.starts_with("row 3"), "{reason}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cells_and_headers() {
        let dir = tempfile::tempdir().unwrap();
        for body in ["a,b\n1,x\n", "a,b\n1,NaN\n", "a,a\n1,2\n", "a,b\n1,inf\n"] {
            let p = write(&dir, "s.csv", body);
            assert!(matches!(parse_roi_csv(&p), Err(Error::MalformedCsv { .. })), "{body}");
        }
        let p = write(&dir, "e.csv", "");
        assert!(matches!(parse_roi_csv(&p), Err(Error::EmptyTable { .. })));
        let p = write(&dir, "h.csv", "a,b\n");
        assert!(matches!(parse_roi_csv(&p), Err(Error::EmptyTable { .. })));
        assert!(matches!(parse_roi_csv(dir.path().join("none.csv")), Err(Error::Io { .. })));
    }
}
